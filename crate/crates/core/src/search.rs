//! Falsification search over nonnegative vectors for objectives that are
//! invariant under positive scaling.
//!
//! The sequence of evaluated points depends only on the seed, never on the
//! budget, so a larger budget extends the run of a smaller one and the best
//! value found is non-decreasing in the budget.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Seeded generator used by every randomized component of the crate.
pub type Rng = Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> Rng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentConfig {
    /// Evaluations after the deterministic starting points.
    pub budget: usize,
    pub seed: u64,
    /// Random samples drawn at the start of every round.
    pub samples_per_round: usize,
    /// Coordinate sweeps per round.
    pub sweeps_per_round: usize,
}

impl AscentConfig {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            seed,
            samples_per_round: 16,
            sweeps_per_round: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentOutcome {
    pub best: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

struct Tracker<F> {
    objective: F,
    used: usize,
    budget: usize,
    best: Vec<f64>,
    value: f64,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<F> {
    /// Evaluates `v` against the budget; `None` once it is exhausted.
    fn eval(&mut self, v: &[f64]) -> Option<f64> {
        if self.used >= self.budget {
            return None;
        }
        self.used += 1;
        Some(self.record(v))
    }

    fn record(&mut self, v: &[f64]) -> f64 {
        let mut val = (self.objective)(v);
        if val.is_nan() {
            val = f64::NEG_INFINITY;
        }
        if val > self.value {
            self.value = val;
            self.best.clear();
            self.best.extend_from_slice(v);
        }
        val
    }
}

/// Maximizes `objective` over nonnegative vectors of length `dim`.
///
/// `starts` are evaluated first and do not count against the budget. Each
/// round then draws `samples_per_round` points from `sampler` and runs
/// multiplicative coordinate ascent from the best point of the round
/// (even rounds) or the best point so far (odd rounds).
pub fn maximize<F, S>(dim: usize, starts: &[Vec<f64>], mut sampler: S, objective: F, cfg: &AscentConfig) -> AscentOutcome
where
    F: FnMut(&[f64]) -> f64,
    S: FnMut(&mut Rng) -> Vec<f64>,
{
    let mut t = Tracker {
        objective,
        used: 0,
        budget: cfg.budget,
        best: vec![0.0; dim],
        value: f64::NEG_INFINITY,
    };
    for s in starts {
        t.record(s);
    }
    let mut evals_before = t.used;
    if dim == 0 {
        return finish(t, starts.len());
    }
    let mut rng = rng(cfg.seed);

    'rounds: for round in 0usize.. {
        let mut round_best = Vec::new();
        let mut round_val = f64::NEG_INFINITY;
        for _ in 0..cfg.samples_per_round {
            if t.used >= t.budget {
                break 'rounds;
            }
            let v = sampler(&mut rng);
            let Some(val) = t.eval(&v) else { break 'rounds };
            if val > round_val {
                round_val = val;
                round_best = v;
            }
        }
        let (mut point, mut val) = if round % 2 == 1 || round_best.is_empty() {
            (t.best.clone(), t.value)
        } else {
            (round_best, round_val)
        };
        for sweep in 0..cfg.sweeps_per_round {
            let step = 4f64.powf(1.0 / (sweep + 1) as f64);
            for k in 0..dim {
                let old = point[k];
                let peak = point.iter().copied().fold(0.0, f64::max);
                let candidates = [
                    if old > 0.0 { old * step } else { peak / 16.0 },
                    old / step,
                    0.0,
                ];
                for c in candidates {
                    if c == old {
                        continue;
                    }
                    point[k] = c;
                    let Some(cv) = t.eval(&point) else { break 'rounds };
                    if cv > val {
                        val = cv;
                        break;
                    }
                    point[k] = old;
                }
            }
        }
        if t.used == evals_before {
            // Nothing left to try (e.g. zero samples per round).
            break;
        }
        evals_before = t.used;
    }
    finish(t, starts.len())
}

fn finish<F>(t: Tracker<F>, starts: usize) -> AscentOutcome {
    AscentOutcome {
        best: t.best,
        value: t.value,
        evaluations: t.used + starts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    /// `(Σ a_k v_k) / Σ v_k`, maximized by concentrating on the largest `a_k`.
    fn weighted_mean(a: &[f64]) -> impl FnMut(&[f64]) -> f64 + '_ {
        move |v: &[f64]| {
            let s: f64 = v.iter().sum();
            if s == 0.0 {
                0.0
            } else {
                v.iter().zip(a).map(|(x, y)| x * y).sum::<f64>() / s
            }
        }
    }

    #[test]
    fn ascent_finds_the_best_coordinate() {
        let a = [0.2, 0.9, 0.5, 0.1];
        let cfg = AscentConfig::new(500, 3);
        let out = maximize(4, &[vec![1.0; 4]], |r| (0..4).map(|_| r.gen::<f64>()).collect(), weighted_mean(&a), &cfg);
        assert!(out.value > 0.85, "{}", out.value);
        assert!(out.evaluations <= 501);
    }

    #[test]
    fn best_value_is_monotone_in_budget() {
        let a = [0.3, 0.1, 0.7, 0.2, 0.6];
        let mut last = f64::NEG_INFINITY;
        for budget in [0, 1, 10, 40, 200] {
            let cfg = AscentConfig::new(budget, 11);
            let out = maximize(5, &[vec![1.0; 5]], |r| (0..5).map(|_| r.gen::<f64>()).collect(), weighted_mean(&a), &cfg);
            assert!(out.value >= last);
            last = out.value;
        }
    }

    #[test]
    fn zero_budget_evaluates_only_starts() {
        let a = [1.0, 2.0];
        let out = maximize(2, &[vec![1.0, 0.0]], |_| unreachable!(), weighted_mean(&a), &AscentConfig::new(0, 0));
        assert_eq!(out.value, 1.0);
        assert_eq!(out.evaluations, 1);
    }
}
