use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type C64 = Complex64;

/// Seed used whenever a caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_f11e_d0c5_2003;

/// Deterministic generator for `seed`, split into independent streams.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Scales `v` to unit 2-norm and returns the original norm. A zero vector is
/// left untouched.
pub fn normalize(v: &mut [C64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

pub fn dot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// A standard complex Gaussian vector of length `n`.
pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect()
}

pub fn gaussian_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let mut v = gaussian_vec(rng, n);
    normalize(&mut v);
    v
}
