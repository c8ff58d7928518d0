//! Periodic spectral grid and real fields.
//!
//! The domain is the interval [-L, L) identified periodically, sampled at n
//! uniform collocation points x_i = -L + i*dx, dx = 2L/n. A `Field` carries
//! the samples of a real function together with a lazily computed discrete
//! Fourier transform, so repeated spectral operations on the same data reuse
//! one forward transform.
//!
//! Wavenumber convention: index j in 0..n maps to the signed integer
//! frequency j' = j for j <= n/2 and j' = j - n otherwise, with physical
//! wavenumber k = pi*j'/L. The Nyquist mode (j = n/2) is annihilated by every
//! odd multiplier (odd-order derivatives, the Hilbert multiplier) so that
//! those operators stay skew-symmetric as maps on real sample vectors.

use once_cell::sync::OnceCell;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{BhError, Result};

/// Uniform periodic grid on [-half_width, half_width).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    n: usize,
    half_width: f64,
}

impl SpectralGrid {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 16 || n % 2 != 0 {
            return Err(BhError::Parameter(format!(
                "grid size must be even and >= 16, got {n}"
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(BhError::Parameter(format!(
                "half_width must be positive and finite, got {half_width}"
            )));
        }
        Ok(SpectralGrid { n, half_width })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Collocation point x_i = -L + i*dx.
    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Signed integer frequency for FFT bin j.
    pub fn signed_freq(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Physical wavenumber pi*j'/L for FFT bin j.
    pub fn wavenumber(&self, j: usize) -> f64 {
        std::f64::consts::PI * self.signed_freq(j) as f64 / self.half_width
    }

    /// Wrap an arbitrary coordinate into [-L, L).
    pub fn wrap(&self, x: f64) -> f64 {
        let l = self.half_width;
        let y = (x + l).rem_euclid(2.0 * l) - l;
        if y >= l {
            -l
        } else {
            y
        }
    }
}

/// Forward/inverse FFT plans, cached per grid size.
fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    static CACHE: Mutex<Option<HashMap<usize, (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>>> =
        Mutex::new(None);
    let mut guard = CACHE.lock().unwrap();
    let map = guard.get_or_insert_with(HashMap::new);
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Real function sampled on a `SpectralGrid`, with a cached spectrum.
#[derive(Debug, Clone)]
pub struct Field {
    grid: SpectralGrid,
    samples: Vec<f64>,
    spectrum: OnceCell<Arc<Vec<Complex64>>>,
}

impl Field {
    pub fn from_samples(grid: SpectralGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(BhError::Parameter(format!(
                "sample count {} does not match grid size {}",
                samples.len(),
                grid.n()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(BhError::Numeric("non-finite sample".into()));
        }
        Ok(Field {
            grid,
            samples,
            spectrum: OnceCell::new(),
        })
    }

    pub fn from_fn(grid: SpectralGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..grid.n()).map(|i| f(grid.x(i))).collect();
        Field::from_samples(grid, samples)
    }

    pub fn zeros(grid: SpectralGrid) -> Self {
        Field {
            grid,
            samples: vec![0.0; grid.n()],
            spectrum: OnceCell::new(),
        }
    }

    pub fn grid(&self) -> SpectralGrid {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Unnormalized DFT of the samples (cached).
    pub fn spectrum(&self) -> Arc<Vec<Complex64>> {
        self.spectrum
            .get_or_init(|| {
                let mut buf: Vec<Complex64> = self
                    .samples
                    .iter()
                    .map(|&v| Complex64::new(v, 0.0))
                    .collect();
                let (fwd, _) = plans(self.grid.n());
                fwd.process(&mut buf);
                Arc::new(buf)
            })
            .clone()
    }

    /// Build a field from an unnormalized spectrum (inverse transform / n).
    pub fn from_spectrum(grid: SpectralGrid, mut spec: Vec<Complex64>) -> Result<Self> {
        if spec.len() != grid.n() {
            return Err(BhError::Parameter("spectrum length mismatch".into()));
        }
        let cached = Arc::new(spec.clone());
        let (_, inv) = plans(grid.n());
        inv.process(&mut spec);
        let scale = 1.0 / grid.n() as f64;
        let samples: Vec<f64> = spec.iter().map(|c| c.re * scale).collect();
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(BhError::Numeric("non-finite sample after transform".into()));
        }
        let field = Field {
            grid,
            samples,
            spectrum: OnceCell::new(),
        };
        let _ = field.spectrum.set(cached);
        Ok(field)
    }

    /// Apply a spectral multiplier m(j', k) mode by mode.
    pub fn apply_multiplier(&self, m: impl Fn(i64, f64) -> Complex64) -> Result<Field> {
        let spec = self.spectrum();
        let out: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(j, &c)| c * m(self.grid.signed_freq(j), self.grid.wavenumber(j)))
            .collect();
        Field::from_spectrum(self.grid, out)
    }

    /// Spectral derivative of the given order (1..=6). Odd orders zero the
    /// Nyquist mode to keep the operator skew-symmetric.
    pub fn derivative(&self, order: u32) -> Result<Field> {
        if !(1..=6).contains(&order) {
            return Err(BhError::Parameter(format!(
                "derivative order must be in 1..=6, got {order}"
            )));
        }
        let n = self.grid.n();
        let nyquist = (n / 2) as i64;
        self.apply_multiplier(|jf, k| {
            if order % 2 == 1 && jf == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k).powu(order)
            }
        })
    }

    /// Pointwise product with 2/3-rule dealiasing: modes with |j'| > n/3 are
    /// zeroed after the multiplication.
    pub fn dealiased_product(&self, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(BhError::GridMismatch(
                "dealiased_product requires identical grids".into(),
            ));
        }
        let prod: Vec<f64> = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| a * b)
            .collect();
        let raw = Field::from_samples(self.grid, prod)?;
        let cut = self.grid.n() as i64 / 3;
        raw.apply_multiplier(|jf, _| {
            if jf.abs() > cut {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
    }

    /// Trigonometric interpolation at an arbitrary point (exact for
    /// band-limited data). The mode sum uses an incrementally rotated phasor,
    /// re-synchronized every 1024 modes to keep roundoff near machine level.
    pub fn interp(&self, x: f64) -> f64 {
        let n = self.grid.n();
        let spec = self.spectrum();
        let theta = std::f64::consts::PI * (self.grid.wrap(x) + self.grid.half_width())
            / self.grid.half_width();
        let rot = Complex64::new(theta.cos(), theta.sin());
        let mut phase = rot; // e^{i*theta*j} for j = 1
        let mut acc = spec[0].re;
        for j in 1..n / 2 {
            if j % 1024 == 0 {
                let a = theta * j as f64;
                phase = Complex64::new(a.cos(), a.sin());
            }
            acc += 2.0 * (spec[j] * phase).re;
            phase *= rot;
        }
        // Nyquist contributes through its cosine only.
        let a = theta * (n / 2) as f64;
        acc += spec[n / 2].re * a.cos();
        acc / n as f64
    }

    pub fn interp_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.interp(x)).collect()
    }

    /// Discrete L2 norm (with dx weight) and sup norm.
    pub fn norms(&self) -> (f64, f64) {
        let l2 = (self.grid.dx() * self.samples.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let linf = self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (l2, linf)
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.grid.n() as f64
    }

    /// Sample-wise scaling c * self.
    pub fn scaled(&self, c: f64) -> Field {
        let samples = self.samples.iter().map(|&a| c * a).collect();
        Field {
            grid: self.grid,
            samples,
            spectrum: OnceCell::new(),
        }
    }

    /// Sample-wise linear combination self + c * other.
    pub fn add_scaled(&self, c: f64, other: &Field) -> Result<Field> {
        if self.grid != other.grid {
            return Err(BhError::GridMismatch("add_scaled grid mismatch".into()));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| a + c * b)
            .collect();
        Field::from_samples(self.grid, samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(n: usize, l: f64) -> SpectralGrid {
        SpectralGrid::new(n, l).unwrap()
    }

    #[test]
    fn derivative_of_single_mode() {
        let g = grid(256, 3.0);
        let f = Field::from_fn(g, |x| (PI * x / 3.0).sin()).unwrap();
        let d = f.derivative(1).unwrap();
        for i in 0..g.n() {
            let want = (PI / 3.0) * (PI * g.x(i) / 3.0).cos();
            assert!((d.samples()[i] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = grid(64, 1.0);
        let f = Field::from_fn(g, |_| 4.25).unwrap();
        for order in 1..=6 {
            let d = f.derivative(order).unwrap();
            assert!(d.samples().iter().all(|v| v.abs() < 1e-12));
        }
    }

    /// C-infinity plateau: 1 on |x| <= 12, 0 on |x| >= 18. Makes the sampled
    /// profile periodization-compatible while leaving |x| <= 10 untouched.
    fn plateau_cut(x: f64) -> f64 {
        let t = ((x.abs() - 12.0) / 6.0).clamp(0.0, 1.0);
        if t <= 0.0 {
            return 1.0;
        }
        if t >= 1.0 {
            return 0.0;
        }
        let a = (-1.0 / (1.0 - t)).exp();
        let b = (-1.0 / t).exp();
        a / (a + b)
    }

    #[test]
    fn derivative_matches_profile_closed_form() {
        let g = grid(4096, 20.0);
        let f = Field::from_fn(g, |x| profile::bar_u(x) * plateau_cut(x)).unwrap();
        let d = f.derivative(1).unwrap();
        let mut worst = 0.0f64;
        for i in 0..g.n() {
            let x = g.x(i);
            if x.abs() <= 10.0 {
                let want = profile::bar_u_derivs(x, 1).derivs[0];
                worst = worst.max((d.samples()[i] - want).abs());
            }
        }
        assert!(worst < 1e-6, "worst derivative error {worst:e}");
    }

    #[test]
    fn derivative_order_out_of_range() {
        let g = grid(64, 1.0);
        let f = Field::zeros(g);
        assert!(f.derivative(0).is_err());
        assert!(f.derivative(7).is_err());
    }

    #[test]
    fn dealiased_product_of_cosines() {
        let g = grid(256, 2.0);
        let f = Field::from_fn(g, |x| (PI * x / 2.0).cos()).unwrap();
        let p = f.dealiased_product(&f).unwrap();
        for i in 0..g.n() {
            let want = 0.5 * (1.0 + (PI * g.x(i)).cos());
            assert!((p.samples()[i] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn dealiased_product_with_zero() {
        let g = grid(128, 1.0);
        let f = Field::from_fn(g, |x| x.sin() + 0.3).unwrap();
        let z = Field::zeros(g);
        let p = f.dealiased_product(&z).unwrap();
        assert!(p.samples().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn interp_single_mode() {
        let g = grid(128, 5.0);
        let f = Field::from_fn(g, |x| (PI * x / 5.0).sin()).unwrap();
        // At a node.
        assert!((f.interp(g.x(17)) - f.samples()[17]).abs() < 1e-13);
        // Half way between nodes.
        let xm = g.x(40) + 0.5 * g.dx();
        assert!((f.interp(xm) - (PI * xm / 5.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn interp_profile_off_grid() {
        let g = grid(4096, 20.0);
        let f = Field::from_fn(g, |x| profile::bar_u(x) * plateau_cut(x)).unwrap();
        let mut worst = 0.0f64;
        for i in (0..g.n()).step_by(37) {
            let x = g.x(i) + 0.5 * g.dx();
            if x.abs() <= 10.0 {
                worst = worst.max((f.interp(x) - profile::bar_u(x)).abs());
            }
        }
        assert!(worst < 1e-6, "worst interp error {worst:e}");
    }

    #[test]
    fn norms_examples() {
        let g = grid(64, 1.0);
        let z = Field::zeros(g);
        assert_eq!(z.norms(), (0.0, 0.0));
        let one = Field::from_fn(g, |_| 1.0).unwrap();
        let (l2, linf) = one.norms();
        assert!((l2 - 2.0f64.sqrt()).abs() < 1e-14);
        assert_eq!(linf, 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// Parseval: dx*sum(f^2) equals the spectral-side energy.
        #[test]
        fn parseval(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = grid(256, 3.0);
            let f = Field::from_samples(
                g,
                (0..g.n()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            ).unwrap();
            let (l2, _) = f.norms();
            let spec = f.spectrum();
            let energy = g.dx() / g.n() as f64
                * spec.iter().map(|c| c.norm_sqr()).sum::<f64>();
            prop_assert!((l2 * l2 - energy).abs() <= 1e-12 * energy.max(1e-30));
        }

        /// Composition: d(d f) = d^2 f for band-limited fields.
        #[test]
        fn derivative_composes(seed in any::<u64>()) {
            let g = grid(256, 2.0);
            let f = band_limited(g, seed);
            let d11 = f.derivative(1).unwrap().derivative(1).unwrap();
            let d2 = f.derivative(2).unwrap();
            let (scale, _) = d2.norms();
            for (a, b) in d11.samples().iter().zip(d2.samples()) {
                prop_assert!((a - b).abs() <= 1e-10 * scale.max(1.0));
            }
        }

        /// Interpolation reproduces samples at the nodes.
        #[test]
        fn interp_at_nodes(seed in any::<u64>(), i in 0usize..256) {
            let g = grid(256, 2.0);
            let f = band_limited(g, seed);
            prop_assert!((f.interp(g.x(i)) - f.samples()[i]).abs() <= 1e-13);
        }

        /// For spectra confined below n/3 the dealiased product is the plain
        /// pointwise product.
        #[test]
        fn dealias_identity_on_low_modes(seed in any::<u64>()) {
            let g = grid(258, 2.0);
            let f = band_limited_below(g, seed, g.n() / 6);
            let p = f.dealiased_product(&f).unwrap();
            for (a, b) in p.samples().iter().zip(f.samples()) {
                prop_assert!((a - b * b).abs() <= 1e-12);
            }
        }
    }

    fn band_limited(g: SpectralGrid, seed: u64) -> Field {
        band_limited_below(g, seed, g.n() / 8)
    }

    fn band_limited_below(g: SpectralGrid, seed: u64, kmax: usize) -> Field {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let modes: Vec<(f64, f64, f64)> = (1..kmax)
            .map(|j| {
                (
                    std::f64::consts::PI * j as f64 / g.half_width(),
                    rng.gen_range(-1.0..1.0) / j as f64,
                    rng.gen_range(-1.0..1.0) / j as f64,
                )
            })
            .collect();
        Field::from_fn(g, |x| {
            modes
                .iter()
                .map(|&(k, a, b)| a * (k * x).cos() + b * (k * x).sin())
                .sum()
        })
        .unwrap()
    }
}
