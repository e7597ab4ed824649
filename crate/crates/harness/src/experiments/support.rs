//! Instance generators shared by the experiments. Everything is driven by
//! the counter-based generator, so a (generator, seed) pair pins the
//! instance bit for bit.

use rwrs_core::enumerate::{for_each_compatible_path, EnumCaps};
use rwrs_core::mc::CounterRng;
use rwrs_core::record::{Color, ColorRecord, StepDistribution};
use rwrs_core::weight::StepWeights;
use std::collections::HashMap;

const STREAM_SCENERY: u64 = 0xA001;
const STREAM_WALK_A: u64 = 0xA002;
const STREAM_WALK_B: u64 = 0xA003;
const STREAM_PICK: u64 = 0xA004;

fn zigzag(site: i64) -> u64 {
    ((site << 1) ^ (site >> 63)) as u64
}

struct LazyScenery<'a> {
    rng: &'a CounterRng,
    colors: HashMap<i64, Color>,
}

impl<'a> LazyScenery<'a> {
    fn new(rng: &'a CounterRng) -> Self {
        LazyScenery {
            rng,
            colors: HashMap::new(),
        }
    }

    fn seeded(rng: &'a CounterRng, known: impl IntoIterator<Item = (i64, Color)>) -> Self {
        LazyScenery {
            rng,
            colors: known.into_iter().collect(),
        }
    }

    fn color(&mut self, site: i64) -> Color {
        let rng = self.rng;
        *self.colors.entry(site).or_insert_with(|| {
            if rng.draw_u64(STREAM_SCENERY, zigzag(site), 0) & 1 == 0 {
                Color::B
            } else {
                Color::W
            }
        })
    }
}

fn sample_step(dist: &StepDistribution, u: f64) -> i64 {
    if u < dist.pause() {
        0
    } else if u < dist.pause() + dist.up() {
        1
    } else {
        -1
    }
}

/// Two positive-probability records of length n agreeing on times 1..=k:
/// one walk over a lazy scenery, then a re-walk of the suffix over the same
/// scenery.
pub fn tampered_pair(
    dist: &StepDistribution,
    n: usize,
    k: usize,
    seed: u64,
) -> (ColorRecord, ColorRecord) {
    let rng = CounterRng::new(seed);
    let mut scenery = LazyScenery::new(&rng);
    let mut pos = 0i64;
    let mut junction = 0i64;
    let mut first = Vec::with_capacity(n);
    for t in 1..=n {
        pos += sample_step(dist, rng.draw_f64(STREAM_WALK_A, t as u64, 0));
        if t == k {
            junction = pos;
        }
        first.push(scenery.color(pos));
    }
    let mut second = first[..k].to_vec();
    let mut pos = junction;
    for t in (k + 1)..=n {
        pos += sample_step(dist, rng.draw_f64(STREAM_WALK_B, t as u64, 0));
        second.push(scenery.color(pos));
    }
    (ColorRecord::new(first), ColorRecord::new(second))
}

/// A positive-probability record: simulate a walk over a lazy scenery.
pub fn random_record(dist: &StepDistribution, n: usize, seed: u64) -> ColorRecord {
    tampered_pair(dist, n, 0, seed).0
}

/// A random positive-probability extension of a prefix: pick one
/// prefix-compatible walk uniformly and continue it with fresh pauseless
/// steps over the scenery it induced. Used with the pauseless fair walk.
pub fn random_extension(prefix: &ColorRecord, ext_len: usize, seed: u64) -> ColorRecord {
    let steps = StepWeights {
        pause: 0.0f64,
        up: 0.5,
        down: 0.5,
    };
    let mut walks: Vec<(i64, Vec<(i64, Color)>)> = Vec::new();
    for_each_compatible_path(prefix, &steps, &EnumCaps::default(), |positions, _, coloring| {
        walks.push((*positions.last().expect("nonempty"), coloring.sites().collect()));
    })
    .expect("prefix enumerable");
    let rng = CounterRng::new(seed);
    let pick = (rng.draw_u64(STREAM_PICK, 0, 0) as usize) % walks.len();
    let (mut pos, known) = walks[pick].clone();
    let mut scenery = LazyScenery::seeded(&rng, known);
    let mut out = Vec::with_capacity(ext_len);
    for t in 1..=ext_len {
        let up = rng.draw_u64(STREAM_WALK_A, t as u64, 1) & 1 == 0;
        pos += if up { 1 } else { -1 };
        out.push(scenery.color(pos));
    }
    ColorRecord::new(out)
}
