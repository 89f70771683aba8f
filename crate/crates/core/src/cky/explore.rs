//! Exploration schedule, softmax sampling and beam pruning.
//!
//! Sampling `k` items without replacement with probability proportional to
//! `softmax(-distance / temperature)` over the remaining items is done with
//! Gumbel keys: every item draws `key = -distance / temperature + G` with
//! `G ~ Gumbel(0, 1)` and the `k` largest keys are taken. This has exactly the
//! sequential-draw distribution and needs a single pass, so it can run while
//! candidates are still being produced.
//!
//! The streaming pruner avoids drawing a key for every candidate. Once `k`
//! keys are held with smallest key `m`, a candidate at distance `d` beats `m`
//! with probability `1 - exp(-w)`, `w = exp(-(m + d / temperature))`, so the
//! wait for the next entrant is found by accumulating `w` against an `Exp(1)`
//! budget. The entrant then draws its key from the Gumbel tail above `m`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::Rng;

use super::GenerationConfig;
use crate::tree::TieKey;

/// Probability that a cell covering `span_len` EDUs explores instead of
/// exploiting: decays linearly from `epsilon_max` at `span_len = 2` to zero at
/// the root span.
pub fn exploration_rate(span_len: usize, n: usize, cfg: &GenerationConfig) -> f64 {
    debug_assert!(span_len >= 2 && span_len <= n);
    if n <= 2 || span_len >= n {
        return 0.0;
    }
    let frac = (span_len - 2) as f64 / (n - 2) as f64;
    (cfg.epsilon_max * (1.0 - frac)).clamp(0.0, 1.0)
}

fn gumbel<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    let u = if u > 0.0 { u } else { f64::MIN_POSITIVE };
    -(-u.ln()).ln()
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    -(1.0 - u).ln()
}

/// Gumbel variate conditioned on exceeding `c`, where `w = exp(-c)`.
fn gumbel_above<R: Rng + ?Sized>(c: f64, w: f64, rng: &mut R) -> f64 {
    // -ln(-ln U) > c  iff  -ln U < w, so draw -ln U from Exp(1) truncated to (0, w)
    let v: f64 = rng.gen();
    let mass = -(-w).exp_m1();
    let e = -(-(1.0 - v) * mass).ln_1p();
    if e > 0.0 {
        (-e.ln()).max(c)
    } else {
        c.max(f64::MIN)
    }
}

#[inline]
fn sample_key<R: Rng + ?Sized>(distance: f64, temperature: f64, rng: &mut R) -> f64 {
    -distance / temperature + gumbel(rng)
}

/// Draws `k` distinct indices, each draw choosing among the remaining items
/// with probability `softmax(-distance / temperature)`. Indices are returned
/// in draw order.
pub fn sample_without_replacement<R: Rng + ?Sized>(
    distances: &[f64],
    k: usize,
    temperature: f64,
    rng: &mut R,
) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = distances
        .iter()
        .enumerate()
        .map(|(i, &d)| (sample_key(d, temperature, rng), i))
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().take(k).map(|(_, i)| i).collect()
}

/// Which way candidates are ranked by distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankOrder {
    #[default]
    Standard,
    /// Prefers the largest distance. Only useful as a negative control for
    /// the oracle check.
    Reversed,
}

struct Ranked<T> {
    key: TieKey,
    seq: u64,
    item: T,
}

impl<T> Ranked<T> {
    fn order(&self, other: &Self) -> Ordering {
        self.key.compare(&other.key).then(self.seq.cmp(&other.seq))
    }
}

impl<T> PartialEq for Ranked<T> {
    fn eq(&self, other: &Self) -> bool {
        self.order(other) == Ordering::Equal
    }
}
impl<T> Eq for Ranked<T> {}
impl<T> PartialOrd for Ranked<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Ranked<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order(other)
    }
}

struct Sampled<T> {
    score: f64,
    ranked: Ranked<T>,
}

impl<T> PartialEq for Sampled<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Sampled<T> {}
impl<T> PartialOrd for Sampled<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Sampled<T> {
    // higher score first, earlier candidate first on equal scores
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then(other.ranked.seq.cmp(&self.ranked.seq))
    }
}

enum Mode<T> {
    Exploit {
        // max-heap: the worst kept candidate sits on top
        kept: BinaryHeap<Ranked<T>>,
    },
    Explore {
        temperature: f64,
        elite: Option<Ranked<T>>,
        // min-heap on sample score
        kept: BinaryHeap<Reverse<Sampled<T>>>,
        // accumulated entry weight and the budget it has to exceed
        acc: f64,
        budget: f64,
    },
}

/// Streaming beam pruner for one chart cell.
///
/// Candidates are offered one at a time, in a fixed enumeration order. The
/// exploration coin is flipped once when the pruner is created. The result
/// depends only on the candidate sequence and the random stream.
///
/// Offering is split in two so callers can avoid building candidates that
/// cannot be kept: [`Pruner::screen`] looks at the distance alone and
/// [`Pruner::admit`] takes the full candidate.
pub(crate) struct Pruner<'r, T, R: Rng + ?Sized> {
    beam_size: usize,
    order: RankOrder,
    seq: u64,
    // oriented distance above which a candidate is certainly not kept
    cutoff: f64,
    // sample score at or below which a candidate is not sampled
    floor: f64,
    mode: Mode<T>,
    rng: &'r mut R,
}

impl<'r, T: Clone, R: Rng + ?Sized> Pruner<'r, T, R> {
    pub(crate) fn new(beam_size: usize, epsilon: f64, temperature: f64, order: RankOrder, rng: &'r mut R) -> Self {
        let explore = epsilon > 0.0 && rng.gen::<f64>() < epsilon;
        let mode = if explore {
            Mode::Explore {
                temperature,
                elite: None,
                kept: BinaryHeap::with_capacity(beam_size + 1),
                acc: 0.0,
                budget: f64::INFINITY,
            }
        } else {
            Mode::Exploit {
                kept: BinaryHeap::with_capacity(beam_size + 1),
            }
        };
        Pruner {
            beam_size,
            order,
            seq: 0,
            cutoff: f64::INFINITY,
            floor: f64::NEG_INFINITY,
            mode,
            rng,
        }
    }

    #[inline]
    fn orient(&self, distance: f64) -> f64 {
        match self.order {
            RankOrder::Standard => distance,
            RankOrder::Reversed => -distance,
        }
    }

    /// First half of an offer. Returns `None` when a candidate at `distance`
    /// cannot be kept, in which case it has been fully accounted for.
    /// Otherwise the candidate must be passed to [`Pruner::admit`] with the
    /// returned ticket.
    #[inline]
    pub(crate) fn screen(&mut self, distance: f64) -> Option<f64> {
        let d = self.orient(distance);
        match &mut self.mode {
            Mode::Exploit { .. } => {
                if d > self.cutoff {
                    self.seq += 1;
                    None
                } else {
                    Some(f64::NAN)
                }
            }
            Mode::Explore {
                temperature,
                acc,
                budget,
                ..
            } => {
                let temperature = *temperature;
                if self.floor == f64::NEG_INFINITY {
                    // sample not yet full: everything gets a key
                    return Some(sample_key(d, temperature, self.rng));
                }
                let c = self.floor + d / temperature;
                let w = (-c).exp();
                *acc += w;
                if *acc > *budget {
                    return Some(-d / temperature + gumbel_above(c, w, self.rng));
                }
                if d <= self.cutoff {
                    // may still become the elite
                    Some(f64::NEG_INFINITY)
                } else {
                    self.seq += 1;
                    None
                }
            }
        }
    }

    /// Second half of an offer. `key.distance` is the same distance that
    /// was screened.
    #[inline(never)]
    pub(crate) fn admit(&mut self, ticket: f64, mut key: TieKey, item: T) {
        key.distance = self.orient(key.distance);
        let ranked = Ranked {
            key,
            seq: self.seq,
            item,
        };
        self.seq += 1;
        match &mut self.mode {
            Mode::Exploit { kept } => {
                if kept.len() < self.beam_size {
                    kept.push(ranked);
                } else if let Some(mut worst) = kept.peek_mut() {
                    if ranked < *worst {
                        *worst = ranked;
                    }
                }
                if kept.len() == self.beam_size {
                    self.cutoff = kept.peek().map_or(f64::INFINITY, |w| w.key.distance);
                }
            }
            Mode::Explore {
                elite,
                kept,
                acc,
                budget,
                ..
            } => {
                if elite.as_ref().is_none_or(|e| ranked < *e) {
                    self.cutoff = ranked.key.distance;
                    *elite = Some(Ranked {
                        key: ranked.key,
                        seq: ranked.seq,
                        item: ranked.item.clone(),
                    });
                }
                if ticket == f64::NEG_INFINITY {
                    return;
                }
                let sampled = Sampled { score: ticket, ranked };
                if kept.len() < self.beam_size {
                    kept.push(Reverse(sampled));
                } else if let Some(mut lowest) = kept.peek_mut() {
                    if sampled > lowest.0 {
                        *lowest = Reverse(sampled);
                    }
                }
                if kept.len() == self.beam_size {
                    self.floor = kept.peek().map_or(f64::NEG_INFINITY, |l| l.0.score);
                    *acc = 0.0;
                    *budget = exp1(self.rng);
                }
            }
        }
    }

    #[inline]
    pub(crate) fn offer(&mut self, key: TieKey, item: T) {
        if let Some(ticket) = self.screen(key.distance) {
            self.admit(ticket, key, item);
        }
    }

    /// Number of candidates offered so far.
    pub(crate) fn offered(&self) -> u64 {
        self.seq
    }

    pub(crate) fn explored(&self) -> bool {
        matches!(self.mode, Mode::Explore { .. })
    }

    /// Kept candidates, best first.
    pub(crate) fn finish(self) -> Vec<T> {
        let mut out: Vec<Ranked<T>> = match self.mode {
            Mode::Exploit { kept } => kept.into_vec(),
            Mode::Explore { elite, kept, .. } => match elite {
                None => Vec::new(),
                Some(elite) => {
                    let mut sampled: Vec<Sampled<T>> = kept.into_iter().map(|r| r.0).collect();
                    sampled.sort_by(|a, b| b.cmp(a));
                    let elite_seq = elite.seq;
                    let mut out = Vec::with_capacity(self.beam_size);
                    out.push(elite);
                    out.extend(
                        sampled
                            .into_iter()
                            .map(|s| s.ranked)
                            .filter(|r| r.seq != elite_seq)
                            .take(self.beam_size - 1),
                    );
                    out
                }
            },
        };
        out.sort();
        out.into_iter().map(|r| r.item).collect()
    }
}
