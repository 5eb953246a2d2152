//! Defining functions g(x, theta) for generalized slicing.
//!
//! A defining function maps a data point and a parameter vector to a scalar;
//! slicing a d-dimensional measure means pushing it through `x -> g(x, theta)`
//! for many parameters. Three families are provided:
//!
//! * linear: `g(x, theta) = <x, theta>`, the classic hyperplane projection;
//! * circular: `g(x, theta) = ||x - r*theta||` for a fixed radius `r`;
//! * odd-degree homogeneous polynomials: `g(x, theta) = sum_{|a|=m} theta_a x^a`.
//!
//! The parameter domain is always the unit sphere in `dim_theta` dimensions.
//! Odd degree keeps the polynomial transform injective; even degrees are
//! rejected at construction.

use ndarray::{Array1, ArrayView1};
use rand::Rng;

use crate::dataset::unit_vector;
use crate::error::{Error, Result};

/// Tolerance on `||theta|| - 1` when validating parameter points.
pub const THETA_NORM_TOL: f64 = 1e-12;

/// Distances below this are treated as the circular singularity `x = r*theta`.
const CIRCULAR_SINGULARITY_TOL: f64 = 1e-12;

/// Largest parameter dimension a polynomial table may have. C(d+m-1, m) grows
/// quickly; beyond this the table itself is the bottleneck and the request is
/// almost certainly a mistake.
const MAX_DIM_THETA: usize = 1_000_000;

/// Multi-indices `a = (a_1, ..., a_d)` with `|a| = m`, in graded
/// lexicographic order (for fixed degree: descending lexicographic, so for
/// d=2, m=3 the order is (3,0), (2,1), (1,2), (0,3)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndexTable {
    indices: Vec<Vec<usize>>,
    dim: usize,
    degree: usize,
}

impl MultiIndexTable {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("multi-index dimension must be >= 1"));
        }
        if degree == 0 {
            return Err(Error::invalid("multi-index degree must be >= 1"));
        }
        let count = binomial(dim + degree - 1, degree)
            .filter(|&c| c <= MAX_DIM_THETA as u128)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "multi-index table for dim {dim}, degree {degree} exceeds \
                     {MAX_DIM_THETA} entries"
                ))
            })? as usize;

        let mut indices = Vec::with_capacity(count);
        let mut current = vec![0usize; dim];
        fill_indices(&mut indices, &mut current, 0, degree);
        debug_assert_eq!(indices.len(), count);
        Ok(Self {
            indices,
            dim,
            degree,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one index for any valid dim and degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    /// The monomial vector `(x^a)_a` in table order.
    pub fn monomials(&self, x: ArrayView1<'_, f64>) -> Array1<f64> {
        Array1::from_iter(self.indices.iter().map(|alpha| monomial(x, alpha)))
    }
}

/// Descending-lexicographic enumeration: highest power on the first free
/// coordinate, then recurse on the rest.
fn fill_indices(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, pos: usize, left: usize) {
    if pos == current.len() - 1 {
        current[pos] = left;
        out.push(current.clone());
        current[pos] = 0;
        return;
    }
    for a in (0..=left).rev() {
        current[pos] = a;
        fill_indices(out, current, pos + 1, left - a);
    }
    current[pos] = 0;
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul((n - k + i) as u128)?;
        acc /= i as u128; // exact: product of i consecutive integers
    }
    Some(acc)
}

fn monomial(x: ArrayView1<'_, f64>, alpha: &[usize]) -> f64 {
    alpha
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(j, &a)| x[j].powi(a as i32))
        .product()
}

/// One member of the defining-function family, fixed to a data dimension.
///
/// All methods are pure; polynomial instances precompute their multi-index
/// table at construction.
#[derive(Debug, Clone, PartialEq)]
pub enum DefiningFunction {
    Linear {
        data_dim: usize,
    },
    Circular {
        data_dim: usize,
        radius: f64,
    },
    PolyHomogeneous {
        data_dim: usize,
        degree: usize,
        table: MultiIndexTable,
    },
}

impl DefiningFunction {
    pub fn linear(data_dim: usize) -> Result<Self> {
        check_dim(data_dim)?;
        Ok(DefiningFunction::Linear { data_dim })
    }

    pub fn circular(data_dim: usize, radius: f64) -> Result<Self> {
        check_dim(data_dim)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!(
                "circular radius must be positive, got {radius}"
            )));
        }
        Ok(DefiningFunction::Circular { data_dim, radius })
    }

    pub fn poly_homogeneous(data_dim: usize, degree: usize) -> Result<Self> {
        check_dim(data_dim)?;
        if degree == 0 || degree % 2 == 0 {
            return Err(Error::invalid(format!(
                "polynomial degree must be odd and >= 1, got {degree}"
            )));
        }
        let table = MultiIndexTable::new(data_dim, degree)?;
        Ok(DefiningFunction::PolyHomogeneous {
            data_dim,
            degree,
            table,
        })
    }

    pub fn data_dim(&self) -> usize {
        match self {
            DefiningFunction::Linear { data_dim }
            | DefiningFunction::Circular { data_dim, .. }
            | DefiningFunction::PolyHomogeneous { data_dim, .. } => *data_dim,
        }
    }

    /// Dimension of the parameter vector: `d` for linear and circular,
    /// `C(d+m-1, m)` for degree-m polynomials.
    pub fn dim_theta(&self) -> usize {
        match self {
            DefiningFunction::Linear { data_dim }
            | DefiningFunction::Circular { data_dim, .. } => *data_dim,
            DefiningFunction::PolyHomogeneous { table, .. } => table.len(),
        }
    }

    /// A short stable name, used in CSV output and error messages.
    pub fn name(&self) -> String {
        match self {
            DefiningFunction::Linear { .. } => "linear".to_string(),
            DefiningFunction::Circular { .. } => "circular".to_string(),
            DefiningFunction::PolyHomogeneous { degree, .. } => format!("poly{degree}"),
        }
    }

    /// `g(x, theta)`. Defined for any finite `theta`, not just unit vectors,
    /// so homogeneity in `theta` can be exercised directly.
    pub fn eval(&self, theta: ArrayView1<'_, f64>, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.check_shapes(theta, x)?;
        Ok(match self {
            DefiningFunction::Linear { .. } => x.dot(&theta),
            DefiningFunction::Circular { radius, .. } => {
                let mut sq = 0.0;
                for (xi, ti) in x.iter().zip(theta.iter()) {
                    let diff = xi - radius * ti;
                    sq += diff * diff;
                }
                sq.sqrt()
            }
            DefiningFunction::PolyHomogeneous { table, .. } => table
                .indices()
                .iter()
                .zip(theta.iter())
                .map(|(alpha, t)| t * monomial(x, alpha))
                .sum(),
        })
    }

    /// Gradient of `g` in the data point.
    ///
    /// The circular family is singular at `x = r*theta`; that point is
    /// reported as [`Error::DegeneratePoint`] rather than silently zeroed.
    pub fn grad_x(
        &self,
        theta: ArrayView1<'_, f64>,
        x: ArrayView1<'_, f64>,
    ) -> Result<Array1<f64>> {
        self.check_shapes(theta, x)?;
        match self {
            DefiningFunction::Linear { .. } => Ok(theta.to_owned()),
            DefiningFunction::Circular { radius, .. } => {
                let diff = &x - &(&theta * *radius);
                let norm = diff.dot(&diff).sqrt();
                if norm < CIRCULAR_SINGULARITY_TOL {
                    return Err(Error::DegeneratePoint);
                }
                Ok(diff / norm)
            }
            DefiningFunction::PolyHomogeneous { table, .. } => {
                let mut grad = Array1::zeros(x.len());
                for (alpha, t) in table.indices().iter().zip(theta.iter()) {
                    for (j, &aj) in alpha.iter().enumerate() {
                        if aj == 0 {
                            continue;
                        }
                        // d/dx_j x^a = a_j * x^(a - e_j)
                        let mut term = *t * aj as f64;
                        for (k, &ak) in alpha.iter().enumerate() {
                            let power = if k == j { ak - 1 } else { ak };
                            if power > 0 {
                                term *= x[k].powi(power as i32);
                            }
                        }
                        grad[j] += term;
                    }
                }
                Ok(grad)
            }
        }
    }

    /// Gradient of `g` in the parameter vector.
    pub fn grad_theta(
        &self,
        theta: ArrayView1<'_, f64>,
        x: ArrayView1<'_, f64>,
    ) -> Result<Array1<f64>> {
        self.check_shapes(theta, x)?;
        match self {
            DefiningFunction::Linear { .. } => Ok(x.to_owned()),
            DefiningFunction::Circular { radius, .. } => {
                let diff = &x - &(&theta * *radius);
                let norm = diff.dot(&diff).sqrt();
                if norm < CIRCULAR_SINGULARITY_TOL {
                    return Err(Error::DegeneratePoint);
                }
                Ok(diff * (-radius / norm))
            }
            DefiningFunction::PolyHomogeneous { table, .. } => Ok(table.monomials(x)),
        }
    }

    /// Normalize `v` onto the parameter domain (the unit sphere).
    pub fn project_to_domain(&self, v: ArrayView1<'_, f64>) -> Result<ThetaParams> {
        if v.len() != self.dim_theta() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_theta(),
                got: v.len(),
            });
        }
        let theta = project_to_unit_sphere(v)?;
        Ok(ThetaParams { theta })
    }

    /// One uniform draw from the parameter domain.
    pub fn sample_theta(&self, rng: &mut impl Rng) -> Array1<f64> {
        unit_vector(self.dim_theta(), rng)
    }

    fn check_shapes(&self, theta: ArrayView1<'_, f64>, x: ArrayView1<'_, f64>) -> Result<()> {
        if x.len() != self.data_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.data_dim(),
                got: x.len(),
            });
        }
        if theta.len() != self.dim_theta() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_theta(),
                got: theta.len(),
            });
        }
        Ok(())
    }
}

fn check_dim(data_dim: usize) -> Result<()> {
    if data_dim == 0 {
        return Err(Error::invalid("data dimension must be >= 1"));
    }
    Ok(())
}

/// `v / ||v||`, rejecting vectors too short to normalize reliably.
pub fn project_to_unit_sphere(v: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
    let norm = v.dot(&v).sqrt();
    if !norm.is_finite() {
        return Err(Error::NonFinite("projection input"));
    }
    if norm < 1e-300 {
        return Err(Error::invalid("cannot project the zero vector to the sphere"));
    }
    Ok(&v / norm)
}

/// A validated point on the parameter domain of a defining function.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaParams {
    theta: Array1<f64>,
}

impl ThetaParams {
    /// Validate dimension and unit norm (`||theta|| = 1` within 1e-12)
    /// against the given function's domain.
    pub fn new(theta: Array1<f64>, f: &DefiningFunction) -> Result<Self> {
        if theta.len() != f.dim_theta() {
            return Err(Error::DimensionMismatch {
                expected: f.dim_theta(),
                got: theta.len(),
            });
        }
        let norm = theta.dot(&theta).sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite("theta"));
        }
        if (norm - 1.0).abs() > THETA_NORM_TOL {
            return Err(Error::invalid(format!(
                "theta must be unit-norm within {THETA_NORM_TOL}, got norm {norm}"
            )));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> &Array1<f64> {
        &self.theta
    }

    pub fn into_inner(self) -> Array1<f64> {
        self.theta
    }
}
