//! Exterior maps of regular polygons and Schwarzians of polygon maps.
//!
//! The exterior Schwarz–Christoffel map of a polygon with prevertices `a_j`
//! and interior angles `πα_j` satisfies `f'(z) = Π (1 - a_j/z)^{β_j}` with
//! `β_j = 1 - α_j` and `Σ β_j = 2`. For the regular `n`-gon this is
//! `f' = (1 - z^{-n})^{2/n}`.
//!
//! Near a prevertex the map opens the exterior angle `(2 - α_j)π`, so the
//! Schwarzian has double-pole coefficient `c_j = (1 - (2 - α_j)²)/2`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{is_finite, real, unit, Cx, Real};
use crate::schwarzian::{RationalSchwarzian, SchwarzianError};
use crate::series::{ExteriorSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolygonError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Schwarzian(#[from] SchwarzianError),
    #[error("a polygon needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("germ order {order} is below 2n = {min}")]
    OrderTooLow { order: usize, min: usize },
    #[error("{angles} angles for {prevertices} prevertices")]
    LengthMismatch { angles: usize, prevertices: usize },
    #[error("angle fraction {value} at vertex {index} is outside [0, 2)")]
    AngleOutOfRange { index: usize, value: f64 },
    #[error("prevertex {index} has modulus {modulus}, expected 1")]
    PrevertexOffCircle { index: usize, modulus: f64 },
    #[error("exterior turning Σ(1 - α_j) = {sum}, expected 2")]
    ClosureViolated { sum: f64 },
    #[error("Σ (1 - α_j) a_j = {residual} is not zero: the map is not single valued")]
    MomentViolated { residual: f64 },
    #[error("residue list has {got} entries for {expected} prevertices")]
    ResidueCount { got: usize, expected: usize },
}

pub type Result<T, E = PolygonError> = std::result::Result<T, E>;

/// Side geometry of an explicit polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Sides {
    /// Straight sides; the residues follow from the prevertices and angles.
    Rectilinear,
    /// Circular arcs, with the accessory residues `c'_j` given as `[re, im]`.
    Circular { residues: Vec<[f64; 2]> },
}

/// A polygon given by its exterior-map data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolygonSpec {
    Regular {
        n: usize,
    },
    /// Prevertices as `[re, im]` on the unit circle and interior angles as
    /// fractions `α_j` of `π`.
    Explicit {
        prevertices: Vec<[f64; 2]>,
        angles: Vec<f64>,
        sides: Sides,
    },
}

/// Validated polygon data over a scalar type.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon<T> {
    prevertices: Vec<Cx<T>>,
    angles: Vec<T>,
    residues: Option<Vec<Cx<T>>>,
}

fn to_cx<T: Real>(p: [f64; 2]) -> Cx<T> {
    Cx::new(T::lit(p[0]), T::lit(p[1]))
}

impl PolygonSpec {
    pub fn regular(n: usize) -> Self {
        PolygonSpec::Regular { n }
    }

    /// Checks the invariants and converts to the working scalar type.
    pub fn validate<T: Real>(&self) -> Result<Polygon<T>> {
        match self {
            PolygonSpec::Regular { n } => {
                let n = *n;
                if n < 2 {
                    return Err(PolygonError::TooFewVertices(n));
                }
                let alpha = T::of(n - 2) / T::of(n);
                let prevertices = (0..n)
                    .map(|j| unit(T::TAU() * T::of(j) / T::of(n)))
                    .collect();
                Ok(Polygon {
                    prevertices,
                    angles: vec![alpha; n],
                    residues: None,
                })
            }
            PolygonSpec::Explicit {
                prevertices,
                angles,
                sides,
            } => {
                if prevertices.len() != angles.len() {
                    return Err(PolygonError::LengthMismatch {
                        angles: angles.len(),
                        prevertices: prevertices.len(),
                    });
                }
                if prevertices.len() < 2 {
                    return Err(PolygonError::TooFewVertices(prevertices.len()));
                }
                for (index, &a) in angles.iter().enumerate() {
                    if !(0.0..2.0).contains(&a) {
                        return Err(PolygonError::AngleOutOfRange { index, value: a });
                    }
                }
                let pv: Vec<Cx<T>> = prevertices.iter().map(|&p| to_cx(p)).collect();
                for (index, a) in pv.iter().enumerate() {
                    if !is_finite(*a) || (a.norm() - T::one()).abs() > T::tol(1e-12) {
                        return Err(PolygonError::PrevertexOffCircle {
                            index,
                            modulus: a.norm().to_f64_lossy(),
                        });
                    }
                }
                let angles: Vec<T> = angles.iter().map(|&a| T::lit(a)).collect();
                let residues = match sides {
                    Sides::Rectilinear => {
                        let sum: T = angles.iter().map(|&a| T::one() - a).sum();
                        if (sum - T::lit(2.0)).abs() > T::tol(1e-12) {
                            return Err(PolygonError::ClosureViolated {
                                sum: sum.to_f64_lossy(),
                            });
                        }
                        let moment: Cx<T> = pv
                            .iter()
                            .zip(&angles)
                            .fold(Cx::zero(), |acc, (&a, &al)| acc + a * (T::one() - al));
                        if moment.norm() > T::tol(1e-10) {
                            return Err(PolygonError::MomentViolated {
                                residual: moment.norm().to_f64_lossy(),
                            });
                        }
                        None
                    }
                    Sides::Circular { residues } => {
                        if residues.len() != pv.len() {
                            return Err(PolygonError::ResidueCount {
                                got: residues.len(),
                                expected: pv.len(),
                            });
                        }
                        Some(residues.iter().map(|&r| to_cx(r)).collect())
                    }
                };
                Ok(Polygon {
                    prevertices: pv,
                    angles,
                    residues,
                })
            }
        }
    }
}

impl<T: Real> Polygon<T> {
    pub fn prevertices(&self) -> &[Cx<T>] {
        &self.prevertices
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.prevertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prevertices.is_empty()
    }

    /// `1 - min α_j`.
    pub fn werner_value(&self) -> T {
        T::one() - self.angles.iter().copied().fold(T::infinity(), T::min)
    }
}

/// `1 - min_j α_j` for a valid spec.
pub fn werner_value<T: Real>(spec: &PolygonSpec) -> Result<T> {
    Ok(spec.validate::<T>()?.werner_value())
}

/// Double-pole coefficient at a vertex with interior angle `πα`.
pub fn angle_coefficient<T: Real>(alpha: T) -> T {
    let g = T::lit(2.0) - alpha;
    (T::one() - g * g) / T::lit(2.0)
}

/// Germ at infinity of the regular `n`-gon exterior map,
/// `f(z) = z + Σ_{j>=1} C(2/n, j) (-1)^j z^{1-nj}/(1 - nj)`, through `z^{-K}`.
pub fn regular_ngon_exterior_map<T: Real>(n: usize, order: usize) -> Result<ExteriorSeries<T>> {
    if n < 2 {
        return Err(PolygonError::TooFewVertices(n));
    }
    if order < 2 * n {
        return Err(PolygonError::OrderTooLow { order, min: 2 * n });
    }
    let a = T::lit(2.0) / T::of(n);
    let mut tail = vec![Cx::zero(); order + 1];
    let mut binom = T::one();
    let mut j = 1;
    while n * j - 1 <= order {
        // C(a, j) (-1)^j from C(a, j-1) (-1)^{j-1}
        binom = -binom * (a - T::of(j - 1)) / T::of(j);
        tail[n * j - 1] = real(binom / (T::one() - T::of(n * j)));
        j += 1;
    }
    Ok(ExteriorSeries::new(tail)?)
}

/// Rational Schwarzian of the polygon's exterior map, with the three decay
/// constraints at infinity checked to `1e-10`.
///
/// For straight sides the residues are
/// `c'_k = 2β_k/a_k - β_k Σ_{l≠k} β_l/(a_k - a_l)`; circular sides use the
/// supplied accessory residues.
pub fn circular_polygon_schwarzian<T: Real>(spec: &PolygonSpec) -> Result<RationalSchwarzian<T>> {
    let poly = spec.validate::<T>()?;
    let a = &poly.prevertices;
    let quadratic: Vec<Cx<T>> = poly
        .angles
        .iter()
        .map(|&al| real(angle_coefficient(al)))
        .collect();
    let residue = match &poly.residues {
        Some(r) => r.clone(),
        None => {
            let beta: Vec<T> = poly.angles.iter().map(|&al| T::one() - al).collect();
            (0..a.len())
                .map(|k| {
                    let mut sum = Cx::zero();
                    for l in 0..a.len() {
                        if l != k {
                            sum = sum + (a[k] - a[l]).inv() * beta[l];
                        }
                    }
                    a[k].inv() * (beta[k] * T::lit(2.0)) - sum * beta[k]
                })
                .collect()
        }
    };
    let r = RationalSchwarzian::new(a.clone(), quadratic, residue)?;
    let residuals = r.decay_residuals();
    let scale = T::one() + r.quadratic().iter().map(|c| c.norm()).sum::<T>();
    if residuals.iter().any(|x| x.norm() > T::tol(1e-10) * scale) {
        return Err(SchwarzianError::DecayViolated {
            residuals: residuals.map(|x| x.norm().to_f64_lossy()),
        }
        .into());
    }
    Ok(r)
}

/// Exterior map of the regular `n`-gon evaluated from its germ; `|z|` should
/// be comfortably above 1 for the truncation to be accurate.
pub fn regular_ngon_eval<T: Real>(n: usize, order: usize, z: Cx<T>) -> Result<Cx<T>> {
    Ok(regular_ngon_exterior_map::<T>(n, order)?.eval(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schwarzian::{schwarzian_of_series_to, SchwarzianSource};
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_gon_is_the_joukowski_slit() {
        let f = regular_ngon_exterior_map::<f64>(2, 8).unwrap();
        for k in 0..=8 {
            let want = if k == 1 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(f.coeff(k).re, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn square_germ_leading_terms() {
        let f = regular_ngon_exterior_map::<f64>(4, 16).unwrap();
        // (1 - u^4)^{1/2} = 1 - u^4/2 - u^8/8 - u^12/16 ...; integrate
        assert_abs_diff_eq!(f.coeff(3).re, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.coeff(7).re, 1.0 / 56.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.coeff(11).re, 1.0 / 176.0, epsilon = 1e-15);
        for k in 0..=16 {
            if (k + 1) % 4 != 0 {
                assert_eq!(f.coeff(k), Cx::zero());
            }
        }
    }

    #[test]
    fn rotational_symmetry_of_the_family() {
        for n in 3..=7 {
            let f = regular_ngon_exterior_map::<f64>(n, 4 * n).unwrap();
            let w = unit(std::f64::consts::TAU / n as f64);
            let z = Cx::new(1.7, 0.4);
            // f(ωz) = ω f(z)
            assert!((f.eval(w * z) - w * f.eval(z)).norm() < 1e-13);
        }
    }

    #[test]
    fn werner_values() {
        assert_abs_diff_eq!(werner_value::<f64>(&PolygonSpec::regular(4)).unwrap(), 0.5);
        assert_abs_diff_eq!(
            werner_value::<f64>(&PolygonSpec::regular(3)).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(werner_value::<f64>(&PolygonSpec::regular(2)).unwrap(), 1.0);
    }

    #[test]
    fn regular_schwarzian_matches_the_germ() {
        for n in 3..=6 {
            let r = circular_polygon_schwarzian::<f64>(&PolygonSpec::regular(n)).unwrap();
            let f = regular_ngon_exterior_map::<f64>(n, 60).unwrap();
            let s = schwarzian_of_series_to(&f, 60).unwrap();
            let e = r.expansion_at_infinity(60);
            for k in 0..=60 {
                assert!((s.coeff(k) - e[k]).norm() < 1e-8, "n={n} k={k}");
            }
            // symmetric residues
            let c = angle_coefficient((n as f64 - 2.0) / n as f64);
            for (a, d) in r.poles().iter().zip(r.residue()) {
                assert!((d + a.conj() * c).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn square_coefficient() {
        assert_abs_diff_eq!(angle_coefficient(0.5), -0.625);
    }

    #[test]
    fn explicit_rectilinear_rectangle_like() {
        let spec = PolygonSpec::Explicit {
            prevertices: vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]],
            angles: vec![0.5; 4],
            sides: Sides::Rectilinear,
        };
        let r = circular_polygon_schwarzian::<f64>(&spec).unwrap();
        let reg = circular_polygon_schwarzian::<f64>(&PolygonSpec::regular(4)).unwrap();
        for (a, b) in r.residue().iter().zip(reg.residue()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn closure_violation_is_rejected() {
        let spec = PolygonSpec::Explicit {
            prevertices: vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]],
            angles: vec![0.5, 0.5, 0.5, 0.6],
            sides: Sides::Rectilinear,
        };
        assert!(matches!(
            circular_polygon_schwarzian::<f64>(&spec),
            Err(PolygonError::ClosureViolated { .. })
        ));
    }

    #[test]
    fn bad_accessory_data_is_rejected_with_residuals() {
        let spec = PolygonSpec::Explicit {
            prevertices: vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]],
            angles: vec![0.5; 4],
            sides: Sides::Circular {
                residues: vec![[0.0, 0.0]; 4],
            },
        };
        match circular_polygon_schwarzian::<f64>(&spec) {
            Err(PolygonError::Schwarzian(SchwarzianError::DecayViolated { residuals })) => {
                assert!(residuals.iter().any(|&x| x > 0.1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn order_and_size_preconditions() {
        assert!(matches!(
            regular_ngon_exterior_map::<f64>(1, 10),
            Err(PolygonError::TooFewVertices(1))
        ));
        assert!(matches!(
            regular_ngon_exterior_map::<f64>(4, 7),
            Err(PolygonError::OrderTooLow { .. })
        ));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = PolygonSpec::regular(5);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"family":"regular","n":5}"#);
        assert_eq!(serde_json::from_str::<PolygonSpec>(&text).unwrap(), spec);
        assert!(
            serde_json::from_str::<PolygonSpec>(r#"{"family":"regular","n":5,"m":1}"#).is_err()
        );
    }
}
