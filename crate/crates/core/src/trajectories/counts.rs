use ndarray::Array2;

use crate::rates::RateSet;

use super::segment::PeriodTrace;

/// Empirical jump statistics of one or more period traces.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpCounts {
    /// Boundaries between adjacent levels, k[i][j] for |i − j| = 1.
    pub k: Array2<u64>,
    /// Boundaries skipping a level, i.e. transitions through a period too
    /// short to resolve. Kept apart from `k`.
    pub unresolved: Array2<u64>,
    pub time_at_level: Vec<f64>,
    pub double_jumps: u64,
    pub triple_jumps: u64,
    pub total_time: f64,
    pub t_m: f64,
}

/// Empirical rate with its Poisson standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
}

impl Estimate {
    fn poisson(count: u64, time: f64) -> Self {
        if time > 0.0 {
            Estimate { value: count as f64 / time, sigma: (count as f64).sqrt() / time }
        } else {
            Estimate { value: f64::NAN, sigma: f64::NAN }
        }
    }

    /// z-score against a prediction; the error is taken from the predicted
    /// count so that zero observed counts remain informative.
    pub fn z(&self, predicted: f64, time: f64) -> f64 {
        if !(time > 0.0) {
            return f64::NAN;
        }
        let sigma = (predicted * time).sqrt() / time;
        if sigma > 0.0 {
            (self.value - predicted) / sigma
        } else if self.value == predicted {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

impl JumpCounts {
    pub fn empty(levels: usize, t_m: f64) -> Self {
        JumpCounts {
            k: Array2::zeros((levels, levels)),
            unresolved: Array2::zeros((levels, levels)),
            time_at_level: vec![0.0; levels],
            double_jumps: 0,
            triple_jumps: 0,
            total_time: 0.0,
            t_m,
        }
    }

    pub fn levels(&self) -> usize {
        self.time_at_level.len()
    }

    pub fn rate(&self, i: usize, j: usize) -> Estimate {
        Estimate::poisson(self.k[[i, j]], self.time_at_level[i])
    }

    pub fn double_jump_rate(&self) -> Estimate {
        Estimate::poisson(self.double_jumps, self.total_time)
    }

    pub fn triple_jump_rate(&self) -> Estimate {
        Estimate::poisson(self.triple_jumps, self.total_time)
    }

    pub fn merge(&mut self, other: &JumpCounts) {
        assert_eq!(self.levels(), other.levels(), "merging counts of different atom numbers");
        self.k += &other.k;
        self.unresolved += &other.unresolved;
        for (a, b) in self.time_at_level.iter_mut().zip(&other.time_at_level) {
            *a += b;
        }
        self.double_jumps += other.double_jumps;
        self.triple_jumps += other.triple_jumps;
        self.total_time += other.total_time;
    }

    pub fn pooled<'a>(levels: usize, t_m: f64, all: impl IntoIterator<Item = &'a JumpCounts>) -> Self {
        let mut acc = JumpCounts::empty(levels, t_m);
        for c in all {
            acc.merge(c);
        }
        acc
    }

    /// Empirical against predicted neighbour rates.
    pub fn compare(&self, rates: &RateSet) -> Vec<Comparison> {
        rates
            .neighbours()
            .into_iter()
            .map(|((i, j), predicted)| {
                let e = self.rate(i, j);
                Comparison { i, j, count: self.k[[i, j]], empirical: e, predicted, z: e.z(predicted, self.time_at_level[i]) }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub i: usize,
    pub j: usize,
    pub count: u64,
    pub empirical: Estimate,
    pub predicted: f64,
    pub z: f64,
}

/// Count boundaries, time at each level and double/triple jumps. A double
/// jump is a period shorter than `t_m` entered and left by unit steps in
/// the same direction; a triple jump is two such consecutive periods.
pub fn count_jumps(trace: &PeriodTrace, levels: usize, t_m: f64) -> JumpCounts {
    let mut c = JumpCounts::empty(levels, t_m);
    let ps = &trace.periods;
    for p in ps {
        c.time_at_level[p.level] += p.duration();
        c.total_time += p.duration();
    }
    for w in ps.windows(2) {
        let (a, b) = (w[0].level, w[1].level);
        if a.abs_diff(b) == 1 {
            c.k[[a, b]] += 1;
        } else {
            c.unresolved[[a, b]] += 1;
        }
    }
    let step = |a: usize, b: usize| b as i64 - a as i64;
    for q in 1..ps.len().saturating_sub(1) {
        let s1 = step(ps[q - 1].level, ps[q].level);
        let s2 = step(ps[q].level, ps[q + 1].level);
        if s1.abs() == 1 && s1 == s2 && ps[q].duration() < t_m {
            c.double_jumps += 1;
            if q + 2 < ps.len() {
                let s3 = step(ps[q + 1].level, ps[q + 2].level);
                if s3 == s1 && ps[q + 1].duration() < t_m {
                    c.triple_jumps += 1;
                }
            }
        }
    }
    c
}
