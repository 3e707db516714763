#![allow(dead_code)]

use std::time::Duration;

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type Kraus = Vec<Matrix2<Complex64>>;

fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn haar_state<R: Rng>(rng: &mut R) -> Vector2<Complex64> {
    let v = Vector2::new(gaussian(rng), gaussian(rng));
    v / Complex64::from(v.norm())
}

/// Haar-random 2x2 unitary.
pub fn haar_unitary<R: Rng>(rng: &mut R) -> Matrix2<Complex64> {
    let g = DMatrix::from_fn(2, 2, |_, _| gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix column phases so the distribution is Haar
    let mut u = Matrix2::zeros();
    for c in 0..2 {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..2 {
            u[(row, c)] = q[(row, c)] * phase;
        }
    }
    u
}

/// Random CPTP channel of Kraus rank `rank` from a random Stinespring isometry.
pub fn random_cptp<R: Rng>(rng: &mut R, rank: usize) -> Kraus {
    let g = DMatrix::from_fn(2 * rank, 2, |_, _| gaussian(rng));
    let v = g.qr().q();
    (0..rank)
        .map(|i| Matrix2::from_fn(|r, c| v[(2 * i + r, c)]))
        .collect()
}

/// Random mixture of unitaries; unital by construction.
pub fn random_unital<R: Rng>(rng: &mut R, terms: usize) -> Kraus {
    let w: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    w.iter()
        .map(|wi| haar_unitary(rng) * Complex64::from((wi / total).sqrt()))
        .collect()
}

/// `(1 - weight) id + weight R` for a random CPTP `R` of the given rank.
pub fn near_identity<R: Rng>(rng: &mut R, rank: usize, weight: f64) -> Kraus {
    let mut kraus: Kraus = vec![Matrix2::identity() * Complex64::from((1.0 - weight).sqrt())];
    kraus.extend(
        random_cptp(rng, rank)
            .into_iter()
            .map(|k| k * Complex64::from(weight.sqrt())),
    );
    kraus
}

/// Kraus operators of `second o first`.
pub fn compose_kraus(second: &Kraus, first: &Kraus) -> Kraus {
    second
        .iter()
        .flat_map(|a| first.iter().map(move |b| a * b))
        .collect()
}

/// `chi_00 = sum_i |Tr K_i|^2 / 4`.
pub fn chi00_from_kraus(kraus: &Kraus) -> f64 {
    kraus.iter().map(|k| k.trace().norm_sqr()).sum::<f64>() / 4.0
}

/// `<psi| E(|psi><psi|) |psi>`.
pub fn pure_state_fidelity(kraus: &Kraus, psi: &Vector2<Complex64>) -> f64 {
    kraus
        .iter()
        .map(|k| (psi.adjoint() * k * psi)[(0, 0)].norm_sqr())
        .sum()
}

pub fn report(number: u32, name: &str, pass: bool, detail: &str, elapsed: Duration) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {number:>2} {verdict} {name}: {detail} [{:.2}s]",
        elapsed.as_secs_f64()
    );
}

pub fn config_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}
