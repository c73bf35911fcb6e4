//! Post-hoc iterate averaging.
//!
//! An [`Averager`] is fed every raw optimizer iterate exactly once, right
//! after the step that produced it, and maintains its own averaged vector
//! theta. The averaged value is read only for evaluation; it never feeds
//! back into gradient computation.

use crate::optim::OptimError;
use crate::params::ParamVector;

/// Which running average to maintain over the raw iterates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AveragerSpec {
    /// No averaging; reads pass the raw iterate through.
    None,
    /// Arithmetic mean of the last `window` iterates.
    Partial { window: usize },
    /// Mean of `groups` consecutive group means, each over `group_size`
    /// iterates. Covers the same span as `Partial` with
    /// `window = groups * group_size` at a fraction of the memory.
    Grouped { groups: usize, group_size: usize },
    /// Exponential moving average theta <- decay*theta + (1-decay)*raw.
    Ema { decay: f64 },
    /// Plain running mean of all iterates from step `start` onward.
    Polyak { start: u64 },
}

/// Running average over raw iterates, initialized at the starting point
/// theta_0 so early reads blend the start value with what has been seen.
#[derive(Clone, Debug)]
pub enum Averager {
    None,
    Partial(PartialMean),
    Grouped(GroupedMean),
    Ema(EmaMean),
    Polyak(PolyakMean),
}

impl Averager {
    pub fn new(spec: AveragerSpec, init: &ParamVector) -> Self {
        match spec {
            AveragerSpec::None => Averager::None,
            AveragerSpec::Partial { window } => {
                assert!(window >= 1, "partial averaging needs a window of at least 1");
                Averager::Partial(PartialMean::new(window, init))
            }
            AveragerSpec::Grouped { groups, group_size } => {
                assert!(groups >= 1 && group_size >= 1, "grouped averaging needs positive group counts");
                Averager::Grouped(GroupedMean::new(groups, group_size, init))
            }
            AveragerSpec::Ema { decay } => {
                assert!((0.0..1.0).contains(&decay), "ema decay must lie in [0, 1), got {decay}");
                Averager::Ema(EmaMean { decay, theta: init.clone() })
            }
            AveragerSpec::Polyak { start } => {
                Averager::Polyak(PolyakMean { start, theta: init.clone() })
            }
        }
    }

    /// Feed the raw iterate produced by optimizer step `n` (1-indexed).
    /// Must be called exactly once per step, in step order.
    pub fn update(&mut self, raw: &ParamVector, n: u64) -> Result<(), OptimError> {
        let expected = match self {
            Averager::None => return Ok(()),
            Averager::Partial(a) => a.theta.len(),
            Averager::Grouped(a) => a.theta.len(),
            Averager::Ema(a) => a.theta.len(),
            Averager::Polyak(a) => a.theta.len(),
        };
        if raw.len() != expected {
            return Err(OptimError::DimensionMismatch { expected, got: raw.len() });
        }
        match self {
            Averager::None => unreachable!(),
            Averager::Partial(a) => a.update(raw),
            Averager::Grouped(a) => a.update(raw, n),
            Averager::Ema(a) => a.update(raw),
            Averager::Polyak(a) => a.update(raw, n),
        }
        Ok(())
    }

    /// The averaged parameters. `raw` is returned for the `None` variant;
    /// the grouped variant reports the value of the last completed group.
    pub fn averaged<'a>(&'a self, raw: &'a ParamVector) -> &'a ParamVector {
        match self {
            Averager::None => raw,
            Averager::Partial(a) => &a.theta,
            Averager::Grouped(a) => &a.theta,
            Averager::Ema(a) => &a.theta,
            Averager::Polyak(a) => &a.theta,
        }
    }
}

/// Sliding-window mean over the last `window` iterates. The ring starts
/// filled with copies of theta_0, so for n < window the value is the blend
/// ((window-n)*theta_0 + sum of seen iterates) / window.
///
/// The window sum is maintained by evict-then-insert and divided on every
/// update; rotating an index replaces the pseudocode's O(window) shift.
/// Subtracting the evicted entry before adding the new one keeps the
/// window = 1 case bitwise equal to the raw iterate.
#[derive(Clone, Debug)]
pub struct PartialMean {
    ring: Vec<ParamVector>,
    next: usize,
    sum: ParamVector,
    theta: ParamVector,
}

impl PartialMean {
    fn new(window: usize, init: &ParamVector) -> Self {
        let w = window as f64;
        Self {
            ring: vec![init.clone(); window],
            next: 0,
            sum: init.iter().map(|x| x * w).collect(),
            theta: init.clone(),
        }
    }

    fn update(&mut self, raw: &ParamVector) {
        let w = self.ring.len() as f64;
        for i in 0..raw.len() {
            let evicted = self.ring[self.next][i];
            self.sum[i] = (self.sum[i] - evicted) + raw[i];
        }
        self.ring[self.next].copy_from(raw);
        self.next = (self.next + 1) % self.ring.len();
        for i in 0..raw.len() {
            self.theta[i] = self.sum[i] / w;
        }
    }
}

/// Grouped mean: accumulate x <- x + raw/group_size every step; at each
/// group boundary fold the finished group mean into a ring of `groups`
/// entries and update theta <- theta + (x - evicted)/groups. Between
/// boundaries theta keeps the last completed group's value. The ring starts
/// filled with theta_0, which makes the boundary values agree with a
/// sliding window of groups*group_size iterates from the very first group.
#[derive(Clone, Debug)]
pub struct GroupedMean {
    group_size: u64,
    ring: Vec<ParamVector>,
    next: usize,
    acc: ParamVector,
    theta: ParamVector,
}

impl GroupedMean {
    fn new(groups: usize, group_size: usize, init: &ParamVector) -> Self {
        Self {
            group_size: group_size as u64,
            ring: vec![init.clone(); groups],
            next: 0,
            acc: ParamVector::zeros(init.len()),
            theta: init.clone(),
        }
    }

    fn update(&mut self, raw: &ParamVector, n: u64) {
        let c = self.group_size as f64;
        for i in 0..raw.len() {
            self.acc[i] += raw[i] / c;
        }
        if n % self.group_size == 0 {
            let b = self.ring.len() as f64;
            for i in 0..raw.len() {
                let evicted = self.ring[self.next][i];
                self.theta[i] += (self.acc[i] - evicted) / b;
            }
            self.ring[self.next].copy_from(&self.acc);
            self.next = (self.next + 1) % self.ring.len();
            for x in self.acc.iter_mut() {
                *x = 0.0;
            }
        }
    }
}

/// Exponentially weighted mean, theta <- decay*theta + (1-decay)*raw.
/// decay = 0 passes the raw iterate through bitwise.
#[derive(Clone, Debug)]
pub struct EmaMean {
    decay: f64,
    theta: ParamVector,
}

impl EmaMean {
    fn update(&mut self, raw: &ParamVector) {
        let d = self.decay;
        for i in 0..raw.len() {
            self.theta[i] = d * self.theta[i] + (1.0 - d) * raw[i];
        }
    }
}

/// Running mean of all iterates from step `start` onward: copies the raw
/// iterate through step `start`, then theta picks up weight 1/(n+1-start)
/// on each new iterate. With start = 0 this averages from theta_0 on.
#[derive(Clone, Debug)]
pub struct PolyakMean {
    start: u64,
    theta: ParamVector,
}

impl PolyakMean {
    fn update(&mut self, raw: &ParamVector, n: u64) {
        if n <= self.start {
            self.theta.copy_from(raw);
        } else {
            let w = 1.0 / ((n - self.start + 1) as f64);
            for i in 0..raw.len() {
                self.theta[i] = (1.0 - w) * self.theta[i] + w * raw[i];
            }
        }
    }
}
