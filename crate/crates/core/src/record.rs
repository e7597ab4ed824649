//! Fundamental types: step distributions, colors, records, walk paths,
//! induced colorings, the compatibility relation and joint path–record
//! weights.
//!
//! Conventions used throughout the crate:
//! - a record of length n represents the colors seen at times 1..=n;
//!   the origin color (time 0) is always a separate conditioning argument;
//! - a walk path stores positions S_0 = 0, S_1, ..., S_n;
//! - the sites visited by S_a..=S_b always form an integer interval, since
//!   every increment lies in {−1, 0, +1}.

use crate::error::Error;
use crate::weight::StepWeights;
use crate::Result;
use std::fmt;

/// One of the two scenery colors. `B < W` so serialized output is
/// deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    B,
    W,
}

impl Color {
    pub fn flipped(self) -> Color {
        match self {
            Color::B => Color::W,
            Color::W => Color::B,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Color::B => 'B',
            Color::W => 'W',
        }
    }

    pub fn from_char(c: char) -> Option<Color> {
        match c {
            'B' => Some(Color::B),
            'W' => Some(Color::W),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A finite sequence of colors. Element `i` (0-based) is the color seen at
/// time `start + i`, where `start` defaults to 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ColorRecord(Vec<Color>);

impl ColorRecord {
    pub fn new(symbols: Vec<Color>) -> Self {
        ColorRecord(symbols)
    }

    pub fn empty() -> Self {
        ColorRecord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Color] {
        &self.0
    }

    /// Color seen at time `t` (1-based). Panics if `t` is 0 or past the end.
    pub fn at_time(&self, t: usize) -> Color {
        self.0[t - 1]
    }

    /// Concatenation; associative.
    pub fn concat(&self, other: &ColorRecord) -> ColorRecord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        ColorRecord(v)
    }

    /// Exchange B and W everywhere.
    pub fn flipped(&self) -> ColorRecord {
        ColorRecord(self.0.iter().map(|c| c.flipped()).collect())
    }

    /// Record as a bit index: bit `t-1` is 1 when the color at time t is W.
    /// Only valid for records of length ≤ 63.
    pub fn as_bits(&self) -> u64 {
        debug_assert!(self.len() <= 63);
        let mut bits = 0u64;
        for (i, c) in self.0.iter().enumerate() {
            if *c == Color::W {
                bits |= 1 << i;
            }
        }
        bits
    }

    pub fn from_bits(bits: u64, len: usize) -> ColorRecord {
        ColorRecord(
            (0..len)
                .map(|i| if bits >> i & 1 == 1 { Color::W } else { Color::B })
                .collect(),
        )
    }
}

impl fmt::Display for ColorRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parse::render(self))
    }
}

impl std::str::FromStr for ColorRecord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        crate::parse::parse_record_expression(s)
    }
}

impl FromIterator<Color> for ColorRecord {
    fn from_iter<I: IntoIterator<Item = Color>>(iter: I) -> Self {
        ColorRecord(iter.into_iter().collect())
    }
}

/// Walk parameters. The step law is
/// P(X = 0) = ε, P(X = +1) = p(1−ε), P(X = −1) = (1−p)(1−ε).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDistribution {
    p: f64,
    epsilon: f64,
}

impl StepDistribution {
    pub fn new(p: f64, epsilon: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "p = {p} outside [1/2, 1]"
            )));
        }
        if !(0.0..1.0).contains(&epsilon) || !epsilon.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "epsilon = {epsilon} outside [0, 1)"
            )));
        }
        let d = StepDistribution { p, epsilon };
        let sum = d.pause() + d.up() + d.down();
        if (sum - 1.0).abs() > f64::EPSILON {
            return Err(Error::InvalidDistribution(format!(
                "step probabilities sum to {sum}, off by more than 1 ulp"
            )));
        }
        Ok(d)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// P(X = 0).
    pub fn pause(&self) -> f64 {
        self.epsilon
    }

    /// P(X = +1).
    pub fn up(&self) -> f64 {
        self.p * (1.0 - self.epsilon)
    }

    /// P(X = −1).
    pub fn down(&self) -> f64 {
        (1.0 - self.p) * (1.0 - self.epsilon)
    }

    /// Probability of a single increment.
    pub fn step_probability(&self, increment: i64) -> f64 {
        match increment {
            0 => self.pause(),
            1 => self.up(),
            -1 => self.down(),
            _ => 0.0,
        }
    }

    /// Step weights for the float engine backends.
    pub fn float_weights(&self) -> StepWeights<f64> {
        StepWeights {
            pause: self.pause(),
            up: self.up(),
            down: self.down(),
        }
    }
}

/// A finite walk S_0 = 0, S_1, ..., S_n with increments in {−1, 0, +1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WalkPath(Vec<i64>);

impl WalkPath {
    pub fn new(positions: Vec<i64>) -> Result<Self> {
        if positions.first() != Some(&0) {
            return Err(Error::Domain(
                "walk path must start at the origin".to_string(),
            ));
        }
        for w in positions.windows(2) {
            let inc = w[1] - w[0];
            if !(-1..=1).contains(&inc) {
                return Err(Error::Domain(format!(
                    "increment {inc} outside {{-1, 0, +1}}"
                )));
            }
        }
        Ok(WalkPath(positions))
    }

    /// Build a path from increments, starting at 0.
    pub fn from_increments(increments: &[i64]) -> Result<Self> {
        let mut positions = Vec::with_capacity(increments.len() + 1);
        let mut pos = 0i64;
        positions.push(pos);
        for &inc in increments {
            pos += inc;
            positions.push(pos);
        }
        WalkPath::new(positions)
    }

    /// Number of steps n (one less than the number of positions).
    pub fn steps(&self) -> usize {
        self.0.len() - 1
    }

    pub fn positions(&self) -> &[i64] {
        &self.0
    }

    pub fn increments(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.windows(2).map(|w| w[1] - w[0])
    }
}

/// Probability of observing the path under the step law; 0 when any
/// increment is impossible (for example a pause at ε = 0).
pub fn path_probability(path: &WalkPath, dist: &StepDistribution) -> f64 {
    path.increments()
        .map(|inc| dist.step_probability(inc))
        .product()
}

/// Number of distinct positions among S_fromTime, ..., S_n.
pub fn range(path: &WalkPath, from_time: usize) -> Result<usize> {
    let positions = path.positions();
    if from_time >= positions.len() {
        return Err(Error::IndexOutOfBounds {
            index: from_time,
            len: positions.len(),
        });
    }
    let tail = &positions[from_time..];
    let min = *tail.iter().min().expect("nonempty");
    let max = *tail.iter().max().expect("nonempty");
    // the visited set of a {−1,0,+1} walk segment is a full interval
    Ok((max - min + 1) as usize)
}

/// Per-site colors over an integer interval. Produced by [`compatible`]
/// (colors induced on the sites visited at times ≥ 1) and by simulation
/// (all visited sites). Sites outside the interval are uncolored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedColoring {
    left: i64,
    colors: Vec<Color>,
}

impl InducedColoring {
    pub fn new(left: i64, colors: Vec<Color>) -> Self {
        InducedColoring { left, colors }
    }

    /// Inclusive interval of colored sites, or None when empty.
    pub fn interval(&self) -> Option<(i64, i64)> {
        if self.colors.is_empty() {
            None
        } else {
            Some((self.left, self.left + self.colors.len() as i64 - 1))
        }
    }

    pub fn color_at(&self, site: i64) -> Option<Color> {
        let idx = site - self.left;
        if idx < 0 {
            return None;
        }
        self.colors.get(idx as usize).copied()
    }

    pub fn sites(&self) -> impl Iterator<Item = (i64, Color)> + '_ {
        self.colors
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.left + i as i64, *c))
    }
}

/// The coloring of the sites visited at times 1..=n induced by requiring the
/// path to generate the record, or None when some revisit would need two
/// different colors. Site 0 is constrained only if revisited at a time ≥ 1.
pub fn compatible(path: &WalkPath, record: &ColorRecord) -> Result<Option<InducedColoring>> {
    let n = path.steps();
    if record.len() != n {
        return Err(Error::LengthMismatch {
            record: record.len(),
            path: n,
        });
    }
    if n == 0 {
        return Ok(Some(InducedColoring::new(0, Vec::new())));
    }
    let positions = &path.positions()[1..];
    let min = *positions.iter().min().expect("nonempty");
    let max = *positions.iter().max().expect("nonempty");
    let width = (max - min + 1) as usize;
    let mut colors: Vec<Option<Color>> = vec![None; width];
    for (t0, &site) in positions.iter().enumerate() {
        let want = record.at_time(t0 + 1);
        let slot = &mut colors[(site - min) as usize];
        match slot {
            None => *slot = Some(want),
            Some(c) if *c == want => {}
            Some(_) => return Ok(None),
        }
    }
    // every site in [min, max] was visited, so all slots are filled
    let colors: Vec<Color> = colors.into_iter().map(|c| c.expect("visited")).collect();
    Ok(Some(InducedColoring::new(min, colors)))
}

/// Joint weight P(S_1^n = s, Y_1^n = y) =
/// P(s) · (1/2)^{R(s_1^n)} · 1{s compatible with y}.
pub fn joint_weight(path: &WalkPath, record: &ColorRecord, dist: &StepDistribution) -> Result<f64> {
    Ok(match compatible(path, record)? {
        None => 0.0,
        Some(_) => {
            let r = range(path, 1)?;
            path_probability(path, dist) * 0.5f64.powi(r as i32)
        }
    })
}

/// Joint weight with the origin color appended:
/// P(S_1^n = s, C_0 = c, Y_1^n = y) = P(s) · (1/2)^{R(s_0^n)} · 1{compatible,
/// site 0 colored c}. The range is taken from time 0, so an unrevisited
/// origin contributes one extra factor 1/2.
pub fn joint_weight_with_origin(
    path: &WalkPath,
    record: &ColorRecord,
    origin: Color,
    dist: &StepDistribution,
) -> Result<f64> {
    Ok(match compatible(path, record)? {
        None => 0.0,
        Some(coloring) => {
            if coloring.color_at(0).is_some_and(|c| c != origin) {
                return Ok(0.0);
            }
            let r = range(path, 0)?;
            path_probability(path, dist) * 0.5f64.powi(r as i32)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(positions: &[i64]) -> WalkPath {
        WalkPath::new(positions.to_vec()).unwrap()
    }

    fn rec(s: &str) -> ColorRecord {
        s.parse().unwrap()
    }

    #[test]
    fn step_probabilities_sum_to_one() {
        for &(p, eps) in &[(0.5, 0.0), (0.7, 0.3), (1.0, 0.0), (0.9, 0.99)] {
            let d = StepDistribution::new(p, eps).unwrap();
            assert!((d.pause() + d.up() + d.down() - 1.0).abs() <= f64::EPSILON);
        }
        assert!(StepDistribution::new(0.4, 0.0).is_err());
        assert!(StepDistribution::new(0.6, 1.0).is_err());
    }

    #[test]
    fn path_probability_examples() {
        let d = StepDistribution::new(0.7, 0.0).unwrap();
        assert!((path_probability(&path(&[0, 1, 2, 3]), &d) - 0.343).abs() < 1e-15);
        assert_eq!(path_probability(&path(&[0, 0]), &d), 0.0);
        let d = StepDistribution::new(0.6, 0.2).unwrap();
        let got = path_probability(&path(&[0, 1, 0]), &d);
        assert!((got - 0.6 * 0.8 * 0.4 * 0.8).abs() < 1e-15);
    }

    #[test]
    fn range_examples() {
        assert_eq!(range(&path(&[0, 1, 2]), 1).unwrap(), 2);
        assert_eq!(range(&path(&[0, 1, 0, 1]), 1).unwrap(), 2);
        assert_eq!(range(&path(&[0, 1, 2]), 0).unwrap(), 3);
        assert!(range(&path(&[0, 1]), 3).is_err());
    }

    #[test]
    fn compatible_examples() {
        let c = compatible(&path(&[0, 1, 2]), &rec("BW")).unwrap().unwrap();
        assert_eq!(c.color_at(1), Some(Color::B));
        assert_eq!(c.color_at(2), Some(Color::W));
        assert_eq!(c.color_at(0), None);

        let c = compatible(&path(&[0, 1, 0, 1]), &rec("BWB"))
            .unwrap()
            .unwrap();
        assert_eq!(c.color_at(0), Some(Color::W));
        assert_eq!(c.color_at(1), Some(Color::B));

        assert!(compatible(&path(&[0, 1, 0, 1]), &rec("BWW"))
            .unwrap()
            .is_none());

        assert!(compatible(&path(&[0, 1]), &rec("BW")).is_err());
    }

    #[test]
    fn joint_weight_examples() {
        let half = StepDistribution::new(0.5, 0.0).unwrap();
        let w = joint_weight(&path(&[0, 1, 2]), &rec("BW"), &half).unwrap();
        assert_eq!(w, 0.25 * 0.25);
        let w = joint_weight(&path(&[0, 1, 0, 1]), &rec("BWW"), &half).unwrap();
        assert_eq!(w, 0.0);
    }

    #[test]
    fn joint_weight_totals_to_one_for_small_n() {
        // law of total probability over all paths and records of length 2
        let d = StepDistribution::new(0.5, 0.0).unwrap();
        let mut total = 0.0;
        for incs in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
            let p = WalkPath::from_increments(&incs).unwrap();
            for bits in 0..4u64 {
                total += joint_weight(&p, &ColorRecord::from_bits(bits, 2), &d).unwrap();
            }
        }
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn origin_weight_counts_unvisited_origin_once() {
        let d = StepDistribution::new(0.5, 0.0).unwrap();
        let p = path(&[0, 1, 2]);
        let w = joint_weight(&p, &rec("BW"), &d).unwrap();
        let wb = joint_weight_with_origin(&p, &rec("BW"), Color::B, &d).unwrap();
        let ww = joint_weight_with_origin(&p, &rec("BW"), Color::W, &d).unwrap();
        assert_eq!(wb + ww, w);
        assert_eq!(wb, ww);

        // revisited origin pins the color
        let p = path(&[0, 1, 0]);
        let wb = joint_weight_with_origin(&p, &rec("BW"), Color::B, &d).unwrap();
        let ww = joint_weight_with_origin(&p, &rec("BW"), Color::W, &d).unwrap();
        assert_eq!(wb, 0.0);
        assert!(ww > 0.0);
    }
}
