use rand::RngCore;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};

use super::sparse::{SparseMatrix, SparseRow};
use super::LupiDataset;

/// Seeded generator: xoshiro256++ (state expanded from the seed with
/// SplitMix64), 53-bit uniforms and Box–Muller normals.
#[derive(Clone, Debug)]
pub struct Prng {
    inner: Xoshiro256PlusPlus,
    spare_normal: Option<f64>,
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal; values come in Box–Muller pairs.
    pub fn normal(&mut self) -> f64 {
        if let Some(v) = self.spare_normal.take() {
            return v;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn rng(&mut self) -> &mut Xoshiro256PlusPlus {
        &mut self.inner
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    /// Training examples.
    pub n: usize,
    /// Test examples.
    pub n_test: usize,
    /// Main-feature dimension.
    pub d: usize,
    pub flip_probability: f64,
    /// Standard deviation of the noise added to the privileged slack.
    pub privileged_noise: f64,
    /// Privileged dimension; coordinates after the first are N(0, 1) noise.
    pub privileged_dim: usize,
    /// Examples with `|w*ᵀx|` below this are redrawn.
    pub min_margin: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n: 100,
            n_test: 1000,
            d: 5,
            flip_probability: 0.15,
            privileged_noise: 0.0,
            privileged_dim: 1,
            min_margin: 1e-6,
            seed: 0,
        }
    }
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.n == 0 {
            return bad("synthetic n must be positive");
        }
        if self.d == 0 {
            return bad("synthetic d must be positive");
        }
        if !(0.0..1.0).contains(&self.flip_probability) {
            return bad("flip probability must lie in [0, 1)");
        }
        if !(self.privileged_noise >= 0.0 && self.privileged_noise.is_finite()) {
            return bad("privileged noise must be nonnegative");
        }
        if self.privileged_dim == 0 {
            return bad("privileged dimension must be positive");
        }
        if !(0.0..=4.0).contains(&self.min_margin) {
            return bad("min margin must lie in [0, 4]");
        }
        Ok(())
    }
}

/// Generated train/test pair plus the direction that labels them.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticLupi {
    pub train: LupiDataset,
    pub test: LupiDataset,
    /// Unit vector `w*` with clean label `sign(w*ᵀx)`.
    pub direction: Vec<f64>,
}

/// Generates a linearly labelled problem whose privileged feature is the
/// hinge slack of the true separator.
///
/// Draw order: `w*` (d normals, normalised); then per training example the
/// features (redrawn while `|w*ᵀx| < min_margin`), one uniform for the
/// label flip, one normal for the privileged noise, and the padding
/// normals; then the test examples without flips or privileged draws.
pub fn synth_lupi(spec: &SynthSpec) -> Result<SyntheticLupi> {
    spec.validate()?;
    let mut rng = Prng::new(spec.seed);
    let mut direction: Vec<f64> = (0..spec.d).map(|_| rng.normal()).collect();
    let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    direction.iter_mut().for_each(|v| *v /= norm);

    let draw = |rng: &mut Prng| -> (Vec<f64>, f64) {
        loop {
            let x: Vec<f64> = (0..spec.d).map(|_| rng.normal()).collect();
            let margin: f64 = x.iter().zip(&direction).map(|(a, b)| a * b).sum();
            if margin.abs() >= spec.min_margin.max(1e-6) {
                return (x, margin);
            }
        }
    };

    let mut x_train = Vec::with_capacity(spec.n);
    let mut z_train = Vec::with_capacity(spec.n);
    let mut y_train = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let (x, margin) = draw(&mut rng);
        let mut y = if margin > 0.0 { 1 } else { -1 };
        if rng.uniform() < spec.flip_probability {
            y = -y;
        }
        let noise = rng.normal();
        let slack = (1.0 - y as f64 * margin).max(0.0) + spec.privileged_noise * noise;
        let mut z = vec![slack];
        z.extend((1..spec.privileged_dim).map(|_| rng.normal()));
        x_train.push(SparseRow::from_dense(&x));
        z_train.push(SparseRow::from_dense(&z));
        y_train.push(y);
    }

    let mut x_test = Vec::with_capacity(spec.n_test);
    let mut y_test = Vec::with_capacity(spec.n_test);
    for _ in 0..spec.n_test {
        let (x, margin) = draw(&mut rng);
        x_test.push(SparseRow::from_dense(&x));
        y_test.push(if margin > 0.0 { 1 } else { -1 });
    }

    let train = LupiDataset::new(
        SparseMatrix {
            rows: x_train,
            dim: spec.d,
        },
        Some(SparseMatrix {
            rows: z_train,
            dim: spec.privileged_dim,
        }),
        y_train,
    )?;
    let test = LupiDataset::new(
        SparseMatrix {
            rows: x_test,
            dim: spec.d,
        },
        None,
        y_test,
    )?;
    Ok(SyntheticLupi { train, test, direction })
}
