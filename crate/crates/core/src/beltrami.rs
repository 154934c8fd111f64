//! Harmonic Beltrami coefficients of the Ahlfors–Weill extension and the
//! pairing functionals `|∬_D μ ψ dx dy|` against trial quadratic
//! differentials.
//!
//! For a Schwarzian `φ` on `|z| > 1` and a ray parameter `t`, the
//! coefficient on the unit disk is
//!
//! * paper-literal: `ν(z) = -(t/2) (1 - |z|²)² φ(1/z̄)`,
//! * classical: `ν(z) = -(t/2) (1 - |z|²)² z̄^{-4} φ(1/z̄)`.
//!
//! The classical weight makes `sup |ν| = (|t|/2) ‖φ‖` exactly; the literal
//! form is smaller away from the boundary and vanishes to order 4 at 0.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{is_finite, unit, Cx, Real};
use crate::schwarzian::{
    bnorm_grid, Domain, GridConfig, HyperbolicNorm, SchwarzianError, SchwarzianSource, AW_RADIUS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeltramiError {
    #[error(transparent)]
    Schwarzian(#[from] SchwarzianError),
    #[error("|t|·‖φ‖ = {value} is not below the gate {gate}")]
    GateViolation { value: f64, gate: f64 },
    #[error("empty trial basis")]
    EmptyBasis,
    #[error("trial element {index} has zero or non-finite mass")]
    DegenerateElement { index: usize },
    #[error("quadrature failed: {non_finite} non-finite samples")]
    Quadrature { non_finite: usize },
    #[error("puncture {0} is outside the closed unit disk")]
    PunctureOutside(f64),
}

pub type Result<T, E = BeltramiError> = std::result::Result<T, E>;

/// Which formula builds the harmonic coefficient from `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    #[serde(rename = "paper")]
    PaperLiteral,
    Classical,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::PaperLiteral => "paper",
            Convention::Classical => "classical",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Convention::PaperLiteral),
            "classical" => Ok(Convention::Classical),
            other => Err(format!(
                "unknown convention `{other}` (expected paper or classical)"
            )),
        }
    }
}

/// A Beltrami coefficient on the unit disk. `None` marks points where the
/// value is undefined; quadrature treats them as failures.
pub trait BeltramiField<T: Real>: Sync {
    fn value(&self, z: Cx<T>) -> Option<Cx<T>>;
}

/// The zero coefficient.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl<T: Real> BeltramiField<T> for ZeroField {
    fn value(&self, _z: Cx<T>) -> Option<Cx<T>> {
        Some(Cx::zero())
    }
}

/// Wraps a closure as a field.
pub struct FnField<F>(pub F);

impl<T: Real, F: Fn(Cx<T>) -> Option<Cx<T>> + Sync> BeltramiField<T> for FnField<F> {
    fn value(&self, z: Cx<T>) -> Option<Cx<T>> {
        (self.0)(z)
    }
}

/// Below this modulus `φ(1/z̄)` is summed from its expansion at infinity.
const SERIES_RADIUS: f64 = 0.25;
const SERIES_TERMS: usize = 48;

/// Harmonic coefficient `ν_t` built from an exterior Schwarzian.
#[derive(Debug, Clone)]
pub struct HarmonicBeltrami<'a, T, S: ?Sized> {
    phi: &'a S,
    t: Cx<T>,
    convention: Convention,
    expansion: Vec<Cx<T>>,
    phi_norm: HyperbolicNorm<T>,
}

/// Builds `ν_t` after checking `|t|·‖φ‖ < gate` with the exterior grid
/// norm. The default gate is the Ahlfors–Weill radius 2.
pub fn aw_coefficient<'a, T: Real, S: SchwarzianSource<T> + ?Sized>(
    phi: &'a S,
    t: Cx<T>,
    convention: Convention,
    grid: &GridConfig,
) -> Result<HarmonicBeltrami<'a, T, S>> {
    phi.check_exterior_admissible()?;
    let norm = bnorm_grid(phi, Domain::Exterior, grid)?;
    HarmonicBeltrami::with_norm(phi, t, convention, norm, T::lit(AW_RADIUS))
}

impl<'a, T: Real, S: SchwarzianSource<T> + ?Sized> HarmonicBeltrami<'a, T, S> {
    /// Same as [`aw_coefficient`] with a precomputed exterior norm of `φ`.
    pub fn with_norm(
        phi: &'a S,
        t: Cx<T>,
        convention: Convention,
        phi_norm: HyperbolicNorm<T>,
        gate: T,
    ) -> Result<Self> {
        let value = t.norm() * phi_norm.value;
        if !(value < gate) {
            return Err(BeltramiError::GateViolation {
                value: value.to_f64_lossy(),
                gate: gate.to_f64_lossy(),
            });
        }
        Ok(Self {
            phi,
            t,
            convention,
            expansion: phi.expansion_at_infinity(SERIES_TERMS),
            phi_norm,
        })
    }

    pub fn t(&self) -> Cx<T> {
        self.t
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Exterior norm of `φ` (without the factor `|t|`).
    pub fn phi_norm(&self) -> &HyperbolicNorm<T> {
        &self.phi_norm
    }

    /// `ν / (1 - |z|²)²`, the part that carries the convention.
    fn core(&self, z: Cx<T>) -> Option<Cx<T>> {
        let zb = z.conj();
        let half = -self.t / T::lit(2.0);
        let reflected = if z.norm() < T::lit(SERIES_RADIUS) {
            // φ(1/z̄) z̄^{-4} = Σ_{k>=4} p_k z̄^{k-4}
            let mut acc = Cx::<T>::zero();
            for &p in self.expansion[4..].iter().rev() {
                acc = acc * zb + p;
            }
            match self.convention {
                Convention::Classical => acc,
                Convention::PaperLiteral => acc * zb.powi(4),
            }
        } else {
            let v = self.phi.eval(zb.inv())?;
            match self.convention {
                Convention::Classical => v * zb.inv().powi(4),
                Convention::PaperLiteral => v,
            }
        };
        let out = reflected * half;
        is_finite(out).then_some(out)
    }

    pub fn eval(&self, z: Cx<T>) -> Option<Cx<T>> {
        if !(z.norm() < T::one()) {
            return None;
        }
        let w = T::one() - z.norm_sqr();
        self.core(z).map(|c| c * (w * w))
    }

    /// `sup_{|z|<1} |ν|` on the same grid machinery as the B-norm.
    pub fn sup_norm(&self, grid: &GridConfig) -> Result<HyperbolicNorm<T>> {
        let f = |z: Cx<T>| self.core(z);
        Ok(bnorm_grid(&f, Domain::Interior, grid)?)
    }
}

impl<T: Real, S: SchwarzianSource<T> + ?Sized> BeltramiField<T> for HarmonicBeltrami<'_, T, S> {
    fn value(&self, z: Cx<T>) -> Option<Cx<T>> {
        self.eval(z)
    }
}

/// A trial quadratic differential before normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrialKind<T> {
    /// `z^k`.
    Monomial(u32),
    /// `1/(z (z - 1)(z - α))`.
    Punctured(Cx<T>),
}

impl<T: Real> TrialKind<T> {
    pub fn eval(&self, z: Cx<T>) -> Option<Cx<T>> {
        let v = match *self {
            TrialKind::Monomial(k) => z.powu(k),
            TrialKind::Punctured(a) => (z * (z - Cx::one()) * (z - a)).inv(),
        };
        is_finite(v).then_some(v)
    }

    pub fn punctures(&self) -> Vec<Cx<T>> {
        match *self {
            TrialKind::Monomial(_) => Vec::new(),
            TrialKind::Punctured(a) => vec![Cx::zero(), Cx::one(), a],
        }
    }
}

/// Normalized trial element `ψ = scale · kind`, with unit mass `∬|ψ| = 1`
/// under the basis quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialElement<T> {
    pub kind: TrialKind<T>,
    pub scale: T,
    /// `ψ = ω²` for a polynomial `ω`.
    pub square: bool,
}

impl<T: Real> TrialElement<T> {
    pub fn eval(&self, z: Cx<T>) -> Option<Cx<T>> {
        self.kind.eval(z).map(|v| v * self.scale)
    }

    pub fn degree(&self) -> Option<u32> {
        match self.kind {
            TrialKind::Monomial(k) => Some(k),
            TrialKind::Punctured(_) => None,
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = nf * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        // recompute derivative at the converged node
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        if n >= 1 {
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    out
}

/// Weighted nodes for `∬_D g dx dy = Σ w_i g(z_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskQuadrature<T> {
    nodes: Vec<(Cx<T>, T)>,
}

fn panel_nodes(breaks: &[f64], rule: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let half = (b - a) / 2.0;
        for &(x, wt) in rule {
            out.push((a + half * (x + 1.0), half * wt));
        }
    }
    out
}

/// Breakpoints on `[lo, hi]` refined geometrically toward each `center`.
fn graded_breaks(lo: f64, hi: f64, centers: &[f64], levels: u32, periodic: bool) -> Vec<f64> {
    let span = hi - lo;
    let mut b = vec![lo, hi];
    for &c in centers {
        let shifts: &[f64] = if periodic { &[-1.0, 0.0, 1.0] } else { &[0.0] };
        for &s in shifts {
            let c = c + s * span;
            b.push(c);
            for j in 1..=levels {
                let d = span * 0.25 * 0.5f64.powi(j as i32 - 1);
                b.push(c - d);
                b.push(c + d);
            }
        }
    }
    b.retain(|x| x.is_finite() && *x >= lo && *x <= hi);
    b.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    b.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    b
}

impl<T: Real> DiskQuadrature<T> {
    /// Tensor Gauss–Legendre in `(r, θ)`: `radial × angular` nodes.
    pub fn tensor(radial: usize, angular: usize) -> Self {
        let rr = panel_nodes(&[0.0, 1.0], &gauss_legendre(radial));
        let tt = panel_nodes(&[0.0, std::f64::consts::TAU], &gauss_legendre(angular));
        Self::from_polar(&rr, &tt)
    }

    /// Composite Gauss–Legendre with panels graded toward the radii and
    /// angles of the given punctures.
    pub fn graded(punctures: &[Cx<T>], levels: u32, per_panel: usize) -> Result<Self> {
        let rule = gauss_legendre(per_panel);
        let mut radii = Vec::new();
        let mut angles = Vec::new();
        for p in punctures {
            let r = p.norm().to_f64_lossy();
            if r > 1.0 + 1e-12 {
                return Err(BeltramiError::PunctureOutside(r));
            }
            radii.push(r.min(1.0));
            if r > 0.0 {
                angles.push(p.arg().to_f64_lossy().rem_euclid(std::f64::consts::TAU));
            }
        }
        let rr = panel_nodes(&graded_breaks(0.0, 1.0, &radii, levels, false), &rule);
        let tt = panel_nodes(
            &graded_breaks(0.0, std::f64::consts::TAU, &angles, levels, true),
            &rule,
        );
        Ok(Self::from_polar(&rr, &tt))
    }

    fn from_polar(rr: &[(f64, f64)], tt: &[(f64, f64)]) -> Self {
        let mut nodes = Vec::with_capacity(rr.len() * tt.len());
        for &(r, wr) in rr {
            for &(th, wt) in tt {
                nodes.push((unit(T::lit(th)) * T::lit(r), T::lit(r * wr * wt)));
            }
        }
        Self { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[(Cx<T>, T)] {
        &self.nodes
    }

    /// `∬_D g`, failing if any sample is missing or non-finite.
    pub fn integrate(&self, g: impl Fn(Cx<T>) -> Option<Cx<T>> + Sync) -> Result<Cx<T>> {
        // Parallel evaluation, sequential summation: results do not depend
        // on thread scheduling.
        let values: Vec<Option<Cx<T>>> = self
            .nodes
            .par_iter()
            .map(|&(z, w)| g(z).filter(|v| is_finite(*v)).map(|v| v * w))
            .collect();
        let bad = values.iter().filter(|v| v.is_none()).count();
        let sum = values.into_iter().flatten().fold(Cx::zero(), |a, b| a + b);
        if bad > 0 {
            return Err(BeltramiError::Quadrature { non_finite: bad });
        }
        Ok(sum)
    }
}

/// Default tensor rule: 200 radial by 400 angular nodes.
pub const RADIAL_NODES: usize = 200;
pub const ANGULAR_NODES: usize = 400;

/// A list of unit-mass trial differentials sharing one quadrature rule.
#[derive(Debug, Clone)]
pub struct TrialBasis<T> {
    elements: Vec<TrialElement<T>>,
    quadrature: DiskQuadrature<T>,
}

impl<T: Real> TrialBasis<T> {
    /// Monomials `z^k`, `k = 0..=degree`, together with the squares
    /// `(z^k)² = z^{2k}`; even degrees are tagged as squares and each degree
    /// appears once.
    pub fn monomials(degree: u32) -> Result<Self> {
        Self::monomials_with(degree, DiskQuadrature::tensor(RADIAL_NODES, ANGULAR_NODES))
    }

    pub fn monomials_with(degree: u32, quadrature: DiskQuadrature<T>) -> Result<Self> {
        let kinds = (0..=2 * degree)
            .filter(|&k| k <= degree || k % 2 == 0)
            .map(TrialKind::Monomial);
        Self::new(kinds, quadrature)
    }

    /// Normalizes each kind to unit mass under `quadrature`.
    pub fn new(
        kinds: impl IntoIterator<Item = TrialKind<T>>,
        quadrature: DiskQuadrature<T>,
    ) -> Result<Self> {
        let mut basis = Self {
            elements: Vec::new(),
            quadrature,
        };
        for kind in kinds {
            basis.push(kind)?;
        }
        if basis.elements.is_empty() {
            return Err(BeltramiError::EmptyBasis);
        }
        Ok(basis)
    }

    fn push(&mut self, kind: TrialKind<T>) -> Result<()> {
        let index = self.elements.len();
        let mass = self
            .quadrature
            .integrate(|z| kind.eval(z).map(|v| Cx::new(v.norm(), T::zero())))
            .map_err(|_| BeltramiError::DegenerateElement { index })?
            .re;
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(BeltramiError::DegenerateElement { index });
        }
        let square = match kind {
            TrialKind::Monomial(k) => k % 2 == 0,
            TrialKind::Punctured(_) => false,
        };
        self.elements.push(TrialElement {
            kind,
            scale: mass.recip(),
            square,
        });
        Ok(())
    }

    /// Adds `ψ₀ = 1/(z(z-1)(z-α))`. The quadrature is replaced by a rule
    /// graded toward the punctures and every element is renormalized.
    pub fn with_punctured(self, alpha: Cx<T>, levels: u32, per_panel: usize) -> Result<Self> {
        let kind = TrialKind::Punctured(alpha);
        let quadrature = DiskQuadrature::graded(&kind.punctures(), levels, per_panel)?;
        let kinds: Vec<_> = self.elements.iter().map(|e| e.kind).chain([kind]).collect();
        Self::new(kinds, quadrature)
    }

    pub fn elements(&self) -> &[TrialElement<T>] {
        &self.elements
    }

    pub fn quadrature(&self) -> &DiskQuadrature<T> {
        &self.quadrature
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Masses of every element, recomputed; all should be 1.
    pub fn masses(&self) -> Result<Vec<T>> {
        self.elements
            .iter()
            .map(|e| {
                self.quadrature
                    .integrate(|z| e.eval(z).map(|v| Cx::new(v.norm(), T::zero())))
                    .map(|m| m.re)
            })
            .collect()
    }

    /// `∬ μ ψ_i` for every element, with `μ` sampled once per node.
    pub fn pairings(&self, mu: &(impl BeltramiField<T> + ?Sized)) -> Result<Vec<Cx<T>>> {
        let nodes = self.quadrature.nodes();
        let samples: Vec<Option<Cx<T>>> = nodes
            .par_iter()
            .map(|&(z, w)| mu.value(z).filter(|v| is_finite(*v)).map(|v| v * w))
            .collect();
        let bad = samples.iter().filter(|s| s.is_none()).count();
        if bad > 0 {
            return Err(BeltramiError::Quadrature { non_finite: bad });
        }
        self.elements
            .par_iter()
            .map(|e| {
                let mut acc = Cx::<T>::zero();
                for (s, &(z, _)) in samples.iter().zip(nodes) {
                    let psi = e
                        .eval(z)
                        .ok_or(BeltramiError::Quadrature { non_finite: 1 })?;
                    acc = acc + psi * s.expect("checked above");
                }
                Ok(acc)
            })
            .collect()
    }
}

/// Best pairing over a subset of the basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingBound<T> {
    pub value: T,
    /// Index into the basis of the maximizing element.
    pub index: usize,
}

fn best_pairing<T: Real>(
    mu: &(impl BeltramiField<T> + ?Sized),
    basis: &TrialBasis<T>,
    keep: impl Fn(&TrialElement<T>) -> bool,
) -> Result<PairingBound<T>> {
    let pairs = basis.pairings(mu)?;
    pairs
        .iter()
        .zip(basis.elements())
        .enumerate()
        .filter(|(_, (_, e))| keep(e))
        .map(|(i, (p, _))| PairingBound {
            value: p.norm(),
            index: i,
        })
        .fold(None, |best: Option<PairingBound<T>>, b| match best {
            Some(x) if x.value >= b.value => Some(x),
            _ => Some(b),
        })
        .ok_or(BeltramiError::EmptyBasis)
}

/// `max_ψ |∬_D μ ψ|` over the basis.
pub fn extremality_lower_bound<T: Real>(
    mu: &(impl BeltramiField<T> + ?Sized),
    basis: &TrialBasis<T>,
) -> Result<PairingBound<T>> {
    best_pairing(mu, basis, |_| true)
}

/// The same maximum restricted to elements tagged as squares.
pub fn a1sq_lower_bound<T: Real>(
    mu: &(impl BeltramiField<T> + ?Sized),
    basis: &TrialBasis<T>,
) -> Result<PairingBound<T>> {
    best_pairing(mu, basis, |e| e.square)
}

/// `μ = k |ψ|/ψ` for a trial kind `ψ`; its pairing with the normalized `ψ`
/// is exactly `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeichmullerType<T> {
    pub k: Cx<T>,
    pub psi: TrialKind<T>,
}

impl<T: Real> TeichmullerType<T> {
    /// The family `μ_t = t |ψ₀|/ψ₀` with `ψ₀ = 1/(z(z-1)(z-α))`.
    pub fn punctured(t: Cx<T>, alpha: Cx<T>) -> Self {
        Self {
            k: t,
            psi: TrialKind::Punctured(alpha),
        }
    }

    pub fn sup_norm(&self) -> T {
        self.k.norm()
    }
}

impl<T: Real> BeltramiField<T> for TeichmullerType<T> {
    fn value(&self, z: Cx<T>) -> Option<Cx<T>> {
        let v = self.psi.eval(z)?;
        let n = v.norm();
        if n == T::zero() {
            return Some(Cx::zero());
        }
        Some(self.k * (v.conj() / n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{circular_polygon_schwarzian, PolygonSpec};
    use crate::scalar::{cx, real};
    use crate::schwarzian::joukowski_schwarzian;

    #[test]
    fn gauss_legendre_small_rules() {
        let r = gauss_legendre(2);
        let x = 1.0 / 3f64.sqrt();
        assert!((r[0].0 + x).abs() < 1e-15 && (r[1].0 - x).abs() < 1e-15);
        assert!((r[0].1 - 1.0).abs() < 1e-15);
        // exact for x^10 with 6 nodes
        let s: f64 = gauss_legendre(6).iter().map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = gauss_legendre(200).iter().map(|p| p.1).sum();
        assert!((total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn monomial_masses_match_closed_form() {
        let q = DiskQuadrature::<f64>::tensor(RADIAL_NODES, ANGULAR_NODES);
        for k in [0u32, 3, 24, 48] {
            let m = q.integrate(|z| Some(real(z.powu(k).norm()))).unwrap().re;
            let exact = std::f64::consts::TAU / (k as f64 + 2.0);
            assert!((m - exact).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn basis_layout_and_unit_mass() {
        let b = TrialBasis::<f64>::monomials(24).unwrap();
        assert_eq!(b.len(), 25 + 12);
        assert!(b.masses().unwrap().iter().all(|m| (m - 1.0).abs() < 1e-8));
        let squares = b.elements().iter().filter(|e| e.square).count();
        assert_eq!(squares, 25);
        assert_eq!(b.elements().last().unwrap().degree(), Some(48));
    }

    #[test]
    fn zero_field_pairs_to_zero() {
        let b = TrialBasis::<f64>::monomials(4).unwrap();
        assert_eq!(extremality_lower_bound(&ZeroField, &b).unwrap().value, 0.0);
        assert_eq!(a1sq_lower_bound(&ZeroField, &b).unwrap().value, 0.0);
    }

    #[test]
    fn teichmuller_alignment() {
        let b = TrialBasis::<f64>::monomials(6).unwrap();
        let mu = TeichmullerType {
            k: cx(0.3, 0.4),
            psi: TrialKind::Monomial(4),
        };
        let full = extremality_lower_bound(&mu, &b).unwrap();
        assert!((full.value - 0.5).abs() < 1e-12);
        assert_eq!(b.elements()[full.index].degree(), Some(4));
        let sq = a1sq_lower_bound(&mu, &b).unwrap();
        assert_eq!(sq, full);
    }

    #[test]
    fn conventions_agree_on_the_boundary_and_differ_at_zero() {
        let phi = joukowski_schwarzian::<f64>();
        let grid = GridConfig::default();
        let t = real(0.2);
        let lit = aw_coefficient(&phi, t, Convention::PaperLiteral, &grid).unwrap();
        let cls = aw_coefficient(&phi, t, Convention::Classical, &grid).unwrap();
        assert_eq!(lit.eval(Cx::zero()).unwrap(), Cx::zero());
        // classical at 0: -(t/2) p_4 with p_4 = -6 for -6/(z² - 1)²
        assert!((cls.eval(Cx::zero()).unwrap() - real(0.6)).norm() < 1e-12);
        let z = cx(0.1, 0.05);
        assert!((lit.eval(z).unwrap() - cls.eval(z).unwrap() * z.conj().powi(4)).norm() < 1e-14);
        // continuity across the series switch
        let a = cx(0.2499999, 0.0);
        let b = cx(0.2500001, 0.0);
        assert!((cls.eval(a).unwrap() - cls.eval(b).unwrap()).norm() < 1e-5);
        let n_l = lit.sup_norm(&grid).unwrap().value;
        let n_c = cls.sup_norm(&grid).unwrap().value;
        assert!((n_c - 0.1 * 6.0).abs() < 1e-3, "{n_c}");
        assert!((n_l - n_c).abs() < 1e-3);
    }

    #[test]
    fn gate_is_enforced() {
        let phi = joukowski_schwarzian::<f64>();
        let grid = GridConfig::default();
        assert!(matches!(
            aw_coefficient(&phi, real(0.4), Convention::Classical, &grid),
            Err(BeltramiError::GateViolation { .. })
        ));
        let zero = aw_coefficient(&phi, Cx::zero(), Convention::Classical, &grid).unwrap();
        assert_eq!(zero.sup_norm(&grid).unwrap().value, 0.0);
    }

    #[test]
    fn pairing_never_exceeds_sup_norm() {
        let phi = circular_polygon_schwarzian::<f64>(&PolygonSpec::regular(4)).unwrap();
        let grid = GridConfig::default();
        let b = TrialBasis::<f64>::monomials(12).unwrap();
        for conv in [Convention::PaperLiteral, Convention::Classical] {
            let nu = aw_coefficient(&phi, real(0.3), conv, &grid).unwrap();
            let sup = nu.sup_norm(&grid).unwrap().value;
            let lb = extremality_lower_bound(&nu, &b).unwrap().value;
            assert!(lb <= sup + 1e-6);
            assert!(a1sq_lower_bound(&nu, &b).unwrap().value <= lb);
        }
    }

    /// `E(k)` by the arithmetic-geometric mean.
    fn elliptic_e(k: f64) -> f64 {
        if k >= 1.0 {
            return 1.0;
        }
        let (mut a, mut b) = (1.0, (1.0 - k * k).sqrt());
        let mut c = k;
        let mut sum = c * c / 2.0;
        let mut p = 1.0;
        for _ in 0..40 {
            let an = (a + b) / 2.0;
            c = (a - b) / 2.0;
            b = (a * b).sqrt();
            a = an;
            p *= 2.0;
            sum += p * c * c / 2.0;
        }
        std::f64::consts::PI / (2.0 * a) * (1.0 - sum)
    }

    #[test]
    fn graded_rule_integrates_a_puncture() {
        // ∬_D dA/|z - a| = 4 E(|a|)
        for a in [cx(0.0, 0.0), cx(0.5, 0.3), cx(1.0, 0.0)] {
            let q = DiskQuadrature::<f64>::graded(&[a], 30, 12).unwrap();
            let v = q
                .integrate(|z| Some(real((z - a).norm().recip())))
                .unwrap()
                .re;
            let exact = 4.0 * elliptic_e(a.norm());
            assert!((v - exact).abs() < 1e-6, "a={a}: {v} vs {exact}");
        }
    }

    #[test]
    fn punctured_element_and_family() {
        let alpha = cx(-0.4, 0.2);
        let b = TrialBasis::<f64>::monomials(2)
            .unwrap()
            .with_punctured(alpha, 30, 12)
            .unwrap();
        let masses = b.masses().unwrap();
        assert!(masses.iter().all(|m| (m - 1.0).abs() < 1e-8));
        let mu = TeichmullerType::punctured(real(0.7), alpha);
        let lb = extremality_lower_bound(&mu, &b).unwrap();
        assert!((lb.value - 0.7).abs() < 1e-4);
        assert!(matches!(
            b.elements()[lb.index].kind,
            TrialKind::Punctured(_)
        ));
    }
}
