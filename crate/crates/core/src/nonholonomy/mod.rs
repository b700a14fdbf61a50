//! Iterated Lie brackets of the constraint distribution and the degree of
//! nonholonomy.
//!
//! Brackets are computed exactly as trigonometric polynomials in
//! `theta, alpha_1, ..., alpha_n` and only then evaluated. The span at each
//! bracket length is generated by the Lyndon words over `{Z1, Z2}` with
//! their standard bracketing, and its dimension is read off a singular
//! value decomposition.

mod trig;

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FullState, VehicleParams};
use trig::TrigPoly;

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOL: f64 = 1e-9;
/// Rank decisions resting on a singular-value ratio inside this band are
/// flagged as indeterminate.
pub const INDETERMINATE_BAND: (f64, f64) = (1e-12, 1e-6);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BracketExpression {
    Z1,
    Z2,
    Bracket(Box<BracketExpression>, Box<BracketExpression>),
}

impl BracketExpression {
    pub fn bracket(a: BracketExpression, b: BracketExpression) -> Self {
        BracketExpression::Bracket(Box::new(a), Box::new(b))
    }

    /// Number of generator leaves.
    pub fn length(&self) -> usize {
        match self {
            BracketExpression::Z1 | BracketExpression::Z2 => 1,
            BracketExpression::Bracket(a, b) => a.length() + b.length(),
        }
    }

    /// Standard bracketing of a Lyndon word over `{1, 2}`: split off the
    /// longest proper Lyndon suffix and recurse.
    pub fn from_lyndon(word: &[u8]) -> Self {
        if word.len() == 1 {
            return if word[0] == 1 {
                BracketExpression::Z1
            } else {
                BracketExpression::Z2
            };
        }
        let split = (1..word.len())
            .find(|&i| is_lyndon(&word[i..]))
            .expect("a Lyndon word of length > 1 has a proper Lyndon suffix");
        BracketExpression::bracket(
            BracketExpression::from_lyndon(&word[..split]),
            BracketExpression::from_lyndon(&word[split..]),
        )
    }
}

impl fmt::Display for BracketExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketExpression::Z1 => write!(f, "Z1"),
            BracketExpression::Z2 => write!(f, "Z2"),
            BracketExpression::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

impl Serialize for BracketExpression {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn is_lyndon(w: &[u8]) -> bool {
    (1..w.len()).all(|i| w[i..] > *w)
}

/// Lyndon words over `{1, 2}` of length `1..=max_len`, ordered by length
/// and then lexicographically (Duval's algorithm).
pub fn lyndon_words(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if max_len == 0 {
        return out;
    }
    let mut w: Vec<u8> = vec![1];
    loop {
        out.push(w.clone());
        let len = w.len();
        while w.len() < max_len {
            w.push(w[w.len() - len]);
        }
        while w.last() == Some(&2) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// A vector field on `Q` whose components are trigonometric polynomials in
/// the angles `(theta, alpha_1, ..., alpha_n)`. Components are ordered
/// `(x, y, theta, alpha_1, ..., alpha_n)` and none depend on `x` or `y`.
#[derive(Debug, Clone)]
struct Field(Vec<TrigPoly>);

impl Field {
    fn generators(params: &VehicleParams) -> (Field, Field) {
        let n = params.trailers;
        let vars = n + 1;
        let zero = TrigPoly::zero(vars);
        let one = TrigPoly::constant(vars, 1.0);
        let cos = |k: usize| TrigPoly::cos(vars, k);
        let sin = |k: usize| TrigPoly::sin(vars, k);

        let mut z1 = vec![cos(0), sin(0), zero.clone()];
        for k in 1..=n {
            let mut head = one.scale(1.0 / params.link);
            for j in 1..k.saturating_sub(1) {
                head = head.mul(&cos(j));
            }
            let tail = if k == 1 {
                sin(1).scale(-1.0)
            } else {
                sin(k - 1).sub(&cos(k - 1).mul(&sin(k)))
            };
            z1.push(head.mul(&tail));
        }
        let mut z2 = vec![zero.clone(), zero.clone(), one.clone()];
        for k in 1..=n {
            z2.push(if k == 1 { one.clone() } else { zero.clone() });
        }
        (Field(z1), Field(z2))
    }

    fn bracket(&self, other: &Field) -> Field {
        let dim = self.0.len();
        let comps = (0..dim)
            .map(|i| {
                let mut acc = TrigPoly::zero(dim - 2);
                for j in 2..dim {
                    let v = j - 2;
                    if !self.0[j].is_zero() {
                        acc = acc.add(&self.0[j].mul(&other.0[i].diff(v)));
                    }
                    if !other.0[j].is_zero() {
                        acc = acc.sub(&other.0[j].mul(&self.0[i].diff(v)));
                    }
                }
                acc
            })
            .collect();
        Field(comps)
    }

    fn eval(&self, angles: &[f64]) -> Vec<f64> {
        self.0.iter().map(|p| p.eval(angles)).collect()
    }
}

/// Builds bracket fields on demand, sharing common subexpressions.
struct FieldCache {
    z1: Field,
    z2: Field,
    memo: HashMap<BracketExpression, Field>,
}

impl FieldCache {
    fn new(params: &VehicleParams) -> Self {
        let (z1, z2) = Field::generators(params);
        FieldCache {
            z1,
            z2,
            memo: HashMap::new(),
        }
    }

    fn field(&mut self, expr: &BracketExpression) -> Field {
        match expr {
            BracketExpression::Z1 => self.z1.clone(),
            BracketExpression::Z2 => self.z2.clone(),
            BracketExpression::Bracket(a, b) => {
                if let Some(f) = self.memo.get(expr) {
                    return f.clone();
                }
                let f = self.field(a).bracket(&self.field(b));
                self.memo.insert(expr.clone(), f.clone());
                f
            }
        }
    }
}

fn check_trailers(params: &VehicleParams) -> Result<()> {
    params.validate()?;
    if params.trailers == 0 {
        return Err(Error::Precondition("at least one trailer".to_string()));
    }
    Ok(())
}

/// Components of the bracket `expr` at `q`, ordered `(x, y, theta, alpha...)`.
pub fn eval_bracket(
    params: &VehicleParams,
    expr: &BracketExpression,
    q: &FullState,
) -> Result<Vec<f64>> {
    check_trailers(params)?;
    Error::check_dim(params.trailers, q.alpha.len())?;
    Ok(FieldCache::new(params).field(expr).eval(&std::iter::once(q.theta).chain(q.alpha.iter().copied()).collect::<Vec<_>>()))
}

/// Outcome of the rank computation at one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonholonomyReport {
    pub alpha: Vec<f64>,
    /// Whether the brackets up to the enumeration cap span `T_q Q`.
    pub spanned: bool,
    /// Smallest `L` such that brackets of length at most `L` span `T_q Q`.
    pub degree: usize,
    /// Degree exceeds the generic degree.
    pub singular: bool,
    /// Some rank decision relied on a singular-value ratio inside
    /// [`INDETERMINATE_BAND`].
    pub indeterminate: bool,
    /// Rank of the span of brackets of length at most `L`, for `L = 1..=degree`.
    pub growth: Vec<usize>,
    /// Brackets, in basis order, that each raised the rank.
    pub spanning_set: Vec<BracketExpression>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonholonomyOptions {
    /// Largest bracket length enumerated; `None` means `n + 3`.
    pub cap: Option<usize>,
    /// Random configurations used to estimate the generic degree.
    pub samples: usize,
    pub seed: u64,
}

impl Default for NonholonomyOptions {
    fn default() -> Self {
        NonholonomyOptions {
            cap: None,
            samples: 32,
            seed: 0x5eed,
        }
    }
}

/// The Lyndon bracket basis up to the cap, ready to be evaluated.
pub struct BracketBasis {
    n: usize,
    cap: usize,
    brackets: Vec<(BracketExpression, Field)>,
}

struct RankInfo {
    rank: usize,
    /// `sigma_dim / sigma_max`, or 0 with fewer than `dim` vectors.
    ratio: f64,
}

fn rank_of(columns: &[Vec<f64>], dim: usize) -> RankInfo {
    if columns.is_empty() {
        return RankInfo { rank: 0, ratio: 0.0 };
    }
    let m = DMatrix::from_fn(dim, columns.len(), |i, j| columns[j][i]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv[0];
    if !(top > 0.0) {
        return RankInfo { rank: 0, ratio: 0.0 };
    }
    let rank = sv.iter().filter(|s| **s > RANK_TOL * top).count();
    let ratio = if sv.len() >= dim { sv[dim - 1] / top } else { 0.0 };
    RankInfo { rank, ratio }
}

fn in_band(ratio: f64) -> bool {
    ratio >= INDETERMINATE_BAND.0 && ratio <= INDETERMINATE_BAND.1
}

impl BracketBasis {
    pub fn new(params: &VehicleParams, cap: Option<usize>) -> Result<Self> {
        check_trailers(params)?;
        let n = params.trailers;
        let cap = cap.unwrap_or(n + 3);
        if cap == 0 {
            return Err(Error::Config("bracket length cap must be positive".to_string()));
        }
        let mut cache = FieldCache::new(params);
        let brackets = lyndon_words(cap)
            .iter()
            .map(|w| {
                let e = BracketExpression::from_lyndon(w);
                let f = cache.field(&e);
                (e, f)
            })
            .collect();
        Ok(BracketBasis { n, cap, brackets })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn expressions(&self) -> impl Iterator<Item = &BracketExpression> {
        self.brackets.iter().map(|(e, _)| e)
    }

    /// Degree at the configuration with relative angles `alpha` (the degree
    /// does not depend on the pose). `singular` is left false.
    pub fn degree_at(&self, alpha: &[f64]) -> Result<NonholonomyReport> {
        self.degree_at_heading(0.0, alpha)
    }

    /// As [`BracketBasis::degree_at`] with the leading car at heading `theta`.
    pub fn degree_at_heading(&self, theta: f64, alpha: &[f64]) -> Result<NonholonomyReport> {
        Error::check_dim(self.n, alpha.len())?;
        let dim = self.n + 3;
        let angles: Vec<f64> = std::iter::once(theta).chain(alpha.iter().copied()).collect();
        let values: Vec<Vec<f64>> = self.brackets.iter().map(|(_, f)| f.eval(&angles)).collect();

        let mut growth = Vec::new();
        let mut indeterminate = false;
        let mut upto = 0;
        for len in 1..=self.cap {
            while upto < self.brackets.len() && self.brackets[upto].0.length() <= len {
                upto += 1;
            }
            let info = rank_of(&values[..upto], dim);
            growth.push(info.rank);
            indeterminate |= in_band(info.ratio);
            if info.rank == dim {
                let mut spanning_set = Vec::new();
                let mut chosen: Vec<Vec<f64>> = Vec::new();
                for (k, v) in values[..upto].iter().enumerate() {
                    chosen.push(v.clone());
                    if rank_of(&chosen, dim).rank == chosen.len() {
                        spanning_set.push(self.brackets[k].0.clone());
                    } else {
                        chosen.pop();
                    }
                    if chosen.len() == dim {
                        break;
                    }
                }
                return Ok(NonholonomyReport {
                    alpha: alpha.to_vec(),
                    spanned: true,
                    degree: len,
                    singular: false,
                    indeterminate,
                    growth,
                    spanning_set,
                });
            }
        }
        Err(Error::BracketCapExceeded {
            rank: *growth.last().unwrap_or(&0),
            dim,
            length: self.cap,
        })
    }

    /// Smallest degree over `samples` random configurations.
    pub fn generic_degree(&self, samples: usize, seed: u64) -> Result<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<Vec<f64>> = (0..samples.max(1))
            .map(|_| (0..self.n).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect())
            .collect();
        points
            .iter()
            .filter_map(|a| self.degree_at(a).ok().map(|r| r.degree))
            .min()
            .ok_or(Error::BracketCapExceeded {
                rank: 0,
                dim: self.n + 3,
                length: self.cap,
            })
    }
}

/// Degree of nonholonomy at `q` with default options.
pub fn degree_of_nonholonomy(params: &VehicleParams, q: &FullState) -> Result<NonholonomyReport> {
    degree_of_nonholonomy_with(params, q, &NonholonomyOptions::default())
}

pub fn degree_of_nonholonomy_with(
    params: &VehicleParams,
    q: &FullState,
    options: &NonholonomyOptions,
) -> Result<NonholonomyReport> {
    let basis = BracketBasis::new(params, options.cap)?;
    Error::check_dim(params.trailers, q.alpha.len())?;
    let generic = basis.generic_degree(options.samples, options.seed)?;
    let mut report = basis.degree_at_heading(q.theta, &q.alpha)?;
    report.singular = report.degree > generic;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub alpha: Vec<f64>,
    /// `None` when the brackets up to the cap do not span.
    pub degree: Option<usize>,
    pub indeterminate: bool,
    pub singular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularScan {
    pub generic_degree: usize,
    pub points: Vec<ScanPoint>,
}

impl SingularScan {
    pub fn singular_points(&self) -> impl Iterator<Item = &ScanPoint> {
        self.points.iter().filter(|p| p.singular)
    }

    /// CSV with header `alpha1,...,alphan,degree,indeterminate`; points
    /// beyond the cap have degree `NA`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let n = self.points.first().map_or(0, |p| p.alpha.len());
        let mut header: Vec<String> = (1..=n).map(|k| format!("alpha{k}")).collect();
        header.push("degree".into());
        header.push("indeterminate".into());
        writeln!(out, "{}", header.join(","))?;
        for p in &self.points {
            let mut row: Vec<String> = p.alpha.iter().map(|a| crate::dynamics::fmt_f64(*a)).collect();
            row.push(p.degree.map_or("NA".to_string(), |d| d.to_string()));
            row.push(p.indeterminate.to_string());
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Scans the grid `alpha_k = -pi + 2 pi i / resolution` on the torus of
/// relative angles and flags points whose degree exceeds the generic one.
pub fn find_singular(params: &VehicleParams, resolution: usize) -> Result<SingularScan> {
    find_singular_with(params, resolution, &NonholonomyOptions::default())
}

pub fn find_singular_with(
    params: &VehicleParams,
    resolution: usize,
    options: &NonholonomyOptions,
) -> Result<SingularScan> {
    if resolution == 0 {
        return Err(Error::Config("grid resolution must be positive".to_string()));
    }
    let basis = BracketBasis::new(params, options.cap)?;
    let generic_degree = basis.generic_degree(options.samples, options.seed)?;
    let n = params.trailers;
    let total = resolution.checked_pow(n as u32).ok_or_else(|| {
        Error::Config(format!("grid of {resolution}^{n} points is too large"))
    })?;
    let step = 2.0 * std::f64::consts::PI / resolution as f64;
    let points = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let mut alpha = vec![0.0; n];
            for k in (0..n).rev() {
                alpha[k] = -std::f64::consts::PI + step * (code % resolution) as f64;
                code /= resolution;
            }
            match basis.degree_at(&alpha) {
                Ok(r) => ScanPoint {
                    alpha,
                    degree: Some(r.degree),
                    indeterminate: r.indeterminate,
                    singular: r.degree > generic_degree,
                },
                Err(_) => ScanPoint {
                    alpha,
                    degree: None,
                    indeterminate: false,
                    singular: true,
                },
            }
        })
        .collect();
    Ok(SingularScan {
        generic_degree,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lyndon_counts() {
        // Necklace counts 2, 1, 2, 3, 6 for lengths 1..=5.
        let words = lyndon_words(5);
        let count = |l: usize| words.iter().filter(|w| w.len() == l).count();
        assert_eq!((1..=5).map(count).collect::<Vec<_>>(), vec![2, 1, 2, 3, 6]);
        assert!(words.iter().all(|w| is_lyndon(w)));
    }

    #[test]
    fn standard_bracketing() {
        let show = |w: &[u8]| BracketExpression::from_lyndon(w).to_string();
        assert_eq!(show(&[1, 2]), "[Z1,Z2]");
        assert_eq!(show(&[1, 1, 2]), "[Z1,[Z1,Z2]]");
        assert_eq!(show(&[1, 2, 2]), "[[Z1,Z2],Z2]");
        assert_eq!(show(&[1, 1, 2, 1, 2]), "[[Z1,[Z1,Z2]],[Z1,Z2]]");
    }

    #[test]
    fn requires_trailers() {
        let p = VehicleParams::default().with_trailers(0);
        assert!(BracketBasis::new(&p, None).is_err());
    }
}
