//! Point clouds and seeded samplers for the toy target distributions.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{seed_rng, standard_normal};

/// An empirical measure: `n` equally weighted samples in `dim` dimensions,
/// one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Array2<f64>,
}

impl PointCloud {
    pub fn new(points: Array2<f64>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::invalid("point cloud must have n >= 1 and dim >= 1"));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("point cloud"));
        }
        Ok(Self { points })
    }

    /// Build from a flat list of rows. Convenient in tests.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("point cloud must have n >= 1"));
        }
        let dim = rows[0].len();
        let mut data = Array2::zeros((rows.len(), dim));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                data[[i, j]] = v;
            }
        }
        Self::new(data)
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn into_points(self) -> Array2<f64> {
        self.points
    }
}

/// Which toy distribution to sample.
///
/// The 2D families mirror the usual synthetic benchmarks: mixtures of
/// Gaussians on a ring or grid, two interleaved crescents, a noisy ring and a
/// planar spiral. `IsotropicGaussian` is the generic d-dimensional source.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetKind {
    /// 8 Gaussian blobs with means equally spaced on a circle.
    Gaussians8 { radius: f64, std: f64 },
    /// 25 Gaussian blobs on a 5x5 grid centred at the origin.
    Gaussians25 { spacing: f64, std: f64 },
    /// Planar spiral r = t/2 for t in [1.5*pi, 4.5*pi], plus isotropic noise.
    SwissRoll { noise: f64 },
    /// Two interleaved crescents, plus isotropic noise.
    HalfMoons { noise: f64 },
    /// Ring of the given radius, plus isotropic noise.
    Circle { radius: f64, noise: f64 },
    /// N(mean, std^2 * I) in `dim` dimensions. `mean = None` means the origin.
    IsotropicGaussian {
        dim: usize,
        mean: Option<Vec<f64>>,
        std: f64,
    },
}

impl DatasetKind {
    pub fn gaussians8() -> Self {
        DatasetKind::Gaussians8 {
            radius: 4.0,
            std: 0.2,
        }
    }

    pub fn gaussians25() -> Self {
        DatasetKind::Gaussians25 {
            spacing: 2.0,
            std: 0.05,
        }
    }

    pub fn swiss_roll() -> Self {
        DatasetKind::SwissRoll { noise: 0.1 }
    }

    pub fn half_moons() -> Self {
        DatasetKind::HalfMoons { noise: 0.05 }
    }

    pub fn circle() -> Self {
        DatasetKind::Circle {
            radius: 2.0,
            noise: 0.05,
        }
    }

    pub fn standard_normal(dim: usize) -> Self {
        DatasetKind::IsotropicGaussian {
            dim,
            mean: None,
            std: 1.0,
        }
    }

    /// Output dimension of this dataset.
    pub fn dim(&self) -> usize {
        match self {
            DatasetKind::IsotropicGaussian { dim, .. } => *dim,
            _ => 2,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{what} must be positive, got {v}")))
            }
        };
        match self {
            DatasetKind::Gaussians8 { radius, std } => {
                positive(*radius, "radius")?;
                positive(*std, "std")
            }
            DatasetKind::Gaussians25 { spacing, std } => {
                positive(*spacing, "spacing")?;
                positive(*std, "std")
            }
            DatasetKind::SwissRoll { noise } | DatasetKind::HalfMoons { noise } => {
                if *noise < 0.0 || !noise.is_finite() {
                    return Err(Error::invalid(format!("noise must be >= 0, got {noise}")));
                }
                Ok(())
            }
            DatasetKind::Circle { radius, noise } => {
                positive(*radius, "radius")?;
                if *noise < 0.0 || !noise.is_finite() {
                    return Err(Error::invalid(format!("noise must be >= 0, got {noise}")));
                }
                Ok(())
            }
            DatasetKind::IsotropicGaussian { dim, mean, std } => {
                if *dim == 0 {
                    return Err(Error::invalid("dim must be >= 1"));
                }
                positive(*std, "std")?;
                if let Some(m) = mean {
                    if m.len() != *dim {
                        return Err(Error::DimensionMismatch {
                            expected: *dim,
                            got: m.len(),
                        });
                    }
                    if m.iter().any(|v| !v.is_finite()) {
                        return Err(Error::NonFinite("mean"));
                    }
                }
                Ok(())
            }
        }
    }
}

/// A fully specified sampling request: distribution, size and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    pub n_samples: usize,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn new(kind: DatasetKind, n_samples: usize, seed: u64) -> Self {
        Self {
            kind,
            n_samples,
            seed,
        }
    }
}

/// Centres of the 8-Gaussians mixture: equally spaced on a circle, starting
/// at angle 0.
pub fn gaussians8_means(radius: f64) -> Vec<[f64; 2]> {
    (0..8)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 8.0;
            [radius * a.cos(), radius * a.sin()]
        })
        .collect()
}

/// Centres of the 25-Gaussians mixture: a 5x5 grid with the given spacing,
/// centred at the origin.
pub fn gaussians25_means(spacing: f64) -> Vec<[f64; 2]> {
    let mut means = Vec::with_capacity(25);
    for i in 0..5 {
        for j in 0..5 {
            means.push([(i as f64 - 2.0) * spacing, (j as f64 - 2.0) * spacing]);
        }
    }
    means
}

/// Draw `spec.n_samples` points from the requested distribution.
///
/// Deterministic: the same spec (including seed) always produces the same
/// cloud.
pub fn sample(spec: &DatasetSpec) -> Result<PointCloud> {
    spec.kind.validate()?;
    if spec.n_samples == 0 {
        return Err(Error::invalid("n_samples must be >= 1"));
    }
    let n = spec.n_samples;
    let mut rng = seed_rng(spec.seed);

    let points = match &spec.kind {
        DatasetKind::Gaussians8 { radius, std } => {
            let means = gaussians8_means(*radius);
            sample_mixture(&means, *std, n, &mut rng)
        }
        DatasetKind::Gaussians25 { spacing, std } => {
            let means = gaussians25_means(*spacing);
            sample_mixture(&means, *std, n, &mut rng)
        }
        DatasetKind::SwissRoll { noise } => {
            let (t0, t1) = (1.5 * std::f64::consts::PI, 4.5 * std::f64::consts::PI);
            let mut pts = Array2::zeros((n, 2));
            for i in 0..n {
                let t = t0 + (t1 - t0) * rng.gen::<f64>();
                let r = t / 2.0;
                pts[[i, 0]] = r * t.cos() + noise * standard_normal(&mut rng);
                pts[[i, 1]] = r * t.sin() + noise * standard_normal(&mut rng);
            }
            pts
        }
        DatasetKind::HalfMoons { noise } => {
            let mut pts = Array2::zeros((n, 2));
            for i in 0..n {
                let t = std::f64::consts::PI * rng.gen::<f64>();
                // Upper crescent, or the lower one shifted to interleave.
                let (x, y) = if rng.gen::<bool>() {
                    (t.cos(), t.sin())
                } else {
                    (1.0 - t.cos(), 0.5 - t.sin())
                };
                pts[[i, 0]] = x + noise * standard_normal(&mut rng);
                pts[[i, 1]] = y + noise * standard_normal(&mut rng);
            }
            pts
        }
        DatasetKind::Circle { radius, noise } => {
            let mut pts = Array2::zeros((n, 2));
            for i in 0..n {
                let a = std::f64::consts::TAU * rng.gen::<f64>();
                pts[[i, 0]] = radius * a.cos() + noise * standard_normal(&mut rng);
                pts[[i, 1]] = radius * a.sin() + noise * standard_normal(&mut rng);
            }
            pts
        }
        DatasetKind::IsotropicGaussian { dim, mean, std } => {
            let mut pts = Array2::zeros((n, *dim));
            for i in 0..n {
                for j in 0..*dim {
                    let m = mean.as_ref().map_or(0.0, |m| m[j]);
                    pts[[i, j]] = m + std * standard_normal(&mut rng);
                }
            }
            pts
        }
    };

    PointCloud::new(points)
}

fn sample_mixture(
    means: &[[f64; 2]],
    std: f64,
    n: usize,
    rng: &mut impl Rng,
) -> Array2<f64> {
    let mut pts = Array2::zeros((n, 2));
    for i in 0..n {
        let c = rng.gen_range(0..means.len());
        pts[[i, 0]] = means[c][0] + std * standard_normal(rng);
        pts[[i, 1]] = means[c][1] + std * standard_normal(rng);
    }
    pts
}

/// Draw `count` points uniformly from the unit sphere in `dim` dimensions
/// (normalized Gaussian vectors).
pub fn sample_unit_sphere(dim: usize, count: usize, seed: u64) -> Result<Vec<Array1<f64>>> {
    let mut rng = seed_rng(seed);
    sample_unit_sphere_with(dim, count, &mut rng)
}

/// As [`sample_unit_sphere`], drawing from a caller-provided generator.
pub fn sample_unit_sphere_with(
    dim: usize,
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Array1<f64>>> {
    if dim == 0 {
        return Err(Error::invalid("sphere dimension must be >= 1"));
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(unit_vector(dim, rng));
    }
    Ok(out)
}

/// One uniform draw from the unit sphere in `dim` dimensions.
pub fn unit_vector(dim: usize, rng: &mut impl Rng) -> Array1<f64> {
    loop {
        let v = Array1::from_iter((0..dim).map(|_| standard_normal(rng)));
        let norm = v.dot(&v).sqrt();
        // A Gaussian vector is almost never this short; redraw rather than
        // divide by garbage.
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_cloud() {
        let spec = DatasetSpec::new(DatasetKind::standard_normal(2), 1, 77);
        let a = sample(&spec).unwrap();
        let b = sample(&spec).unwrap();
        assert_eq!(a.points(), b.points());
        assert_eq!(a.len(), 1);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn all_kinds_are_deterministic() {
        for kind in [
            DatasetKind::gaussians8(),
            DatasetKind::gaussians25(),
            DatasetKind::swiss_roll(),
            DatasetKind::half_moons(),
            DatasetKind::circle(),
            DatasetKind::standard_normal(3),
        ] {
            let spec = DatasetSpec::new(kind, 64, 5);
            let a = sample(&spec).unwrap();
            let b = sample(&spec).unwrap();
            assert_eq!(a.points(), b.points());
        }
    }

    #[test]
    fn circle_zero_noise_lies_on_ring() {
        let spec = DatasetSpec::new(
            DatasetKind::Circle {
                radius: 2.5,
                noise: 0.0,
            },
            500,
            11,
        );
        let cloud = sample(&spec).unwrap();
        for row in cloud.points().rows() {
            let r = (row[0] * row[0] + row[1] * row[1]).sqrt();
            assert!((r - 2.5).abs() <= 1e-12, "radius {r}");
        }
    }

    #[test]
    fn gaussians8_component_means_recovered() {
        // Law of large numbers at ~1e5 points per component: bucket samples by
        // nearest centre and compare the bucket mean with the configured mean.
        let radius = 4.0;
        let std = 0.2;
        let spec = DatasetSpec::new(DatasetKind::Gaussians8 { radius, std }, 800_000, 31);
        let cloud = sample(&spec).unwrap();
        let means = gaussians8_means(radius);

        let mut sums = vec![[0.0f64; 2]; 8];
        let mut counts = vec![0usize; 8];
        for row in cloud.points().rows() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, m) in means.iter().enumerate() {
                let d = (row[0] - m[0]).powi(2) + (row[1] - m[1]).powi(2);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            sums[best][0] += row[0];
            sums[best][1] += row[1];
            counts[best] += 1;
        }

        for c in 0..8 {
            assert!(counts[c] > 90_000, "component {c} underpopulated");
            let bound = 3.0 * std / (counts[c] as f64).sqrt();
            for axis in 0..2 {
                let mean = sums[c][axis] / counts[c] as f64;
                assert!(
                    (mean - means[c][axis]).abs() <= bound,
                    "component {c} axis {axis}: {mean} vs {} (bound {bound})",
                    means[c][axis]
                );
            }
        }
    }

    #[test]
    fn zero_samples_rejected() {
        let spec = DatasetSpec::new(DatasetKind::circle(), 0, 1);
        assert!(sample(&spec).is_err());
    }

    #[test]
    fn sphere_dim_one_is_signs() {
        let vs = sample_unit_sphere(1, 100, 3).unwrap();
        for v in vs {
            assert!((v[0].abs() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn sphere_vectors_unit_norm_and_centred() {
        let vs = sample_unit_sphere(3, 10_000, 17).unwrap();
        let mut coord_sums = [0.0f64; 3];
        for v in &vs {
            let norm = v.dot(v).sqrt();
            assert!((norm - 1.0).abs() <= 1e-12);
            for a in 0..3 {
                coord_sums[a] += v[a];
            }
        }
        for s in coord_sums {
            assert!((s / 10_000.0).abs() < 0.05);
        }
    }

    #[test]
    fn sphere_dim_zero_rejected() {
        assert!(sample_unit_sphere(0, 1, 0).is_err());
    }

    #[test]
    fn high_dim_draws_concentrate_orthogonally() {
        // Pr(|<theta, u>| < eps) > 1 - exp(-d eps^2) for u fixed on the
        // sphere. The bound is a small-(d eps^2) statement: for d eps^2 >> 1
        // it overshoots the true probability (the exact tail is only
        // O(exp(-d eps^2 / 2))), so the matrix below stays in its regime.
        for (dim, eps) in [(10, 0.1), (10, 0.3), (100, 0.05), (100, 0.1)] {
            let vs = sample_unit_sphere(dim, 10_000, 23).unwrap();
            let mut u = Array1::zeros(dim);
            u[0] = 1.0;
            let frac = vs.iter().filter(|v| v.dot(&u).abs() < eps).count() as f64 / 10_000.0;
            let bound = 1.0 - (-(dim as f64) * eps * eps).exp();
            assert!(
                frac >= bound,
                "d={dim} eps={eps}: frac {frac} < bound {bound}"
            );
        }
    }

    #[test]
    fn half_moons_stays_in_band() {
        let spec = DatasetSpec::new(DatasetKind::HalfMoons { noise: 0.0 }, 1000, 2);
        let cloud = sample(&spec).unwrap();
        for row in cloud.points().rows() {
            assert!(row[0] >= -1.0 - 1e-9 && row[0] <= 2.0 + 1e-9);
            assert!(row[1] >= -0.5 - 1e-9 && row[1] <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn isotropic_mean_offset_applies() {
        let spec = DatasetSpec::new(
            DatasetKind::IsotropicGaussian {
                dim: 3,
                mean: Some(vec![10.0, 0.0, -5.0]),
                std: 0.1,
            },
            2000,
            8,
        );
        let cloud = sample(&spec).unwrap();
        let mean = cloud.points().mean_axis(ndarray::Axis(0)).unwrap();
        assert!((mean[0] - 10.0).abs() < 0.02);
        assert!(mean[1].abs() < 0.02);
        assert!((mean[2] + 5.0).abs() < 0.02);
    }
}
