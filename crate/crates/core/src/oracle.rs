//! Brute-force reference computations.
//!
//! Each function here recomputes a quantity the library also produces, by a
//! route that shares no code with it: midpoint sums over the circle, tensor
//! quadrature over the sphere, explicit state vectors, and the spectrum of
//! the CHSH operator from its squared form. Tests freeze values from these
//! and the `oracle` subcommand prints them.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

/// `E(Δθ)` of the sign model by a midpoint sum over `n` hidden angles.
pub fn sign_model_expectation_quadrature(delta: f64, n: usize) -> f64 {
    let sgn = |x: f64| if x >= 0.0 { 1.0 } else { -1.0 };
    let h = TAU / n as f64;
    let sum: f64 = (0..n)
        .map(|i| {
            let lambda = (i as f64 + 0.5) * h;
            // particle 2 answers the opposite sign
            0.5 * sgn(lambda.cos()) * -0.5 * sgn((lambda - delta).cos())
        })
        .sum();
    sum / n as f64
}

/// Fraction of `n` midpoint angles lying in every half-circle
/// `{λ : sign·cos(λ − θ) ≥ 0}` of `clauses = [(θ, sign)]`.
pub fn circle_subset_measure(clauses: &[(f64, f64)], n: usize) -> f64 {
    let h = TAU / n as f64;
    let hits = (0..n)
        .filter(|&i| {
            let lambda = (i as f64 + 0.5) * h;
            clauses.iter().all(|&(theta, sign)| {
                let c = (lambda - theta).cos();
                if sign > 0.0 {
                    c >= 0.0
                } else {
                    c < 0.0
                }
            })
        })
        .count();
    hits as f64 / n as f64
}

/// Gauss-Legendre nodes and weights on `[−1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `∫_{Σ_h} (r·f)/π dΩ` on the unit sphere, with `f` and `h` coplanar unit
/// axes at angles `field_theta` and `hemi_theta` from `z`.
///
/// Tensor rule in the frame of `h`: Gauss-Legendre in `cos` of the polar
/// angle over `[0, 1]`, equal-weight points in azimuth.
pub fn hemisphere_average_quadrature(field_theta: f64, hemi_theta: f64, nodes: usize) -> f64 {
    let h = [hemi_theta.sin(), 0.0, hemi_theta.cos()];
    let t = [hemi_theta.cos(), 0.0, -hemi_theta.sin()];
    let y = [0.0, 1.0, 0.0];
    let f = [field_theta.sin(), 0.0, field_theta.cos()];
    let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let azimuths = 2 * nodes;
    let mut total = 0.0;
    for (x, w) in gauss_legendre(nodes) {
        let u = 0.5 * (x + 1.0);
        let s = (1.0 - u * u).sqrt();
        for j in 0..azimuths {
            let phi = TAU * j as f64 / azimuths as f64;
            let r = [0, 1, 2].map(|k| u * h[k] + s * (phi.cos() * t[k] + phi.sin() * y[k]));
            total += 0.5 * w * (TAU / azimuths as f64) * dot(r, f) / PI;
        }
    }
    total
}

/// `|⟨ψ| (|s_a⟩_a ⊗ |s_b⟩_b)|²` for the singlet `(|+−⟩ − |−+⟩)/√2`, with
/// spin states along a coplanar axis `θ` written as
/// `|+⟩ = (cos θ/2, sin θ/2)`, `|−⟩ = (−sin θ/2, cos θ/2)`.
pub fn singlet_probability_statevector(up1: bool, theta_a: f64, up2: bool, theta_b: f64) -> f64 {
    let ket = |up: bool, theta: f64| {
        let (s, c) = (0.5 * theta).sin_cos();
        if up {
            [c, s]
        } else {
            [-s, c]
        }
    };
    let (u, v) = (ket(up1, theta_a), ket(up2, theta_b));
    let product = [u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]];
    let psi = [0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0];
    let amp: f64 = psi.iter().zip(product).map(|(p, q)| p * q).sum();
    amp * amp
}

/// Spectral norm of the CHSH operator from the spectrum of its square,
/// `¼ ± ¼ sin(θ_a′−θ_a) sin(θ_b′−θ_b)`.
pub fn chsh_operator_norm_closed_form(a: f64, a_prime: f64, b: f64, b_prime: f64) -> f64 {
    0.5 * (1.0 + ((a_prime - a).sin() * (b_prime - b).sin()).abs()).sqrt()
}

/// Largest CHSH operator norm over a `res³` grid of `(a′, b, b′)` with `a = 0`.
pub fn tsirelson_grid_max(res: usize) -> f64 {
    let step = TAU / res as f64;
    let mut best: f64 = 0.0;
    for i in 0..res {
        for j in 0..res {
            for k in 0..res {
                let v = chsh_operator_norm_closed_form(
                    0.0,
                    i as f64 * step,
                    j as f64 * step,
                    k as f64 * step,
                );
                best = best.max(v);
            }
        }
    }
    best
}

/// `|E(a,b) − E(a,b′)| + |E(a′,b) + E(a′,b′)|` for `E = −¼ cos(Δθ)`.
pub fn singlet_chsh(a: f64, a_prime: f64, b: f64, b_prime: f64) -> f64 {
    let e = |x: f64, y: f64| -0.25 * (y - x).cos();
    (e(a, b) - e(a, b_prime)).abs() + (e(a_prime, b) + e(a_prime, b_prime)).abs()
}

/// Largest singlet CHSH value over a `res³` grid of `(a′, b, b′)` with
/// `a = 0`, both sign choices, as `(value, a′, b, b′)`.
pub fn singlet_chsh_grid_max(res: usize) -> (f64, f64, f64, f64) {
    let step = TAU / res as f64;
    let e = |x: f64, y: f64| -0.25 * (y - x).cos();
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0, 0.0);
    for i in 0..res {
        for j in 0..res {
            for k in 0..res {
                let (a2, b, b2) = (i as f64 * step, j as f64 * step, k as f64 * step);
                let minus = (e(0.0, b) - e(0.0, b2)).abs() + (e(a2, b) + e(a2, b2)).abs();
                let plus = (e(0.0, b) + e(0.0, b2)).abs() + (e(a2, b) - e(a2, b2)).abs();
                let v = minus.max(plus);
                if v > best.0 + 1e-12 {
                    best = (v, a2, b, b2);
                }
            }
        }
    }
    best
}

/// Mean of `sign(J_b)/2` over `J` uniform on the hemisphere `J_a > 0`, by
/// tensor quadrature: `1/2 − |Δθ|/π` for coplanar axes.
pub fn hemisphere_sign_rule_mean(delta: f64, nodes: usize) -> f64 {
    let b = [delta.sin(), 0.0, delta.cos()];
    let azimuths = 4 * nodes;
    let mut total = 0.0;
    for (x, w) in gauss_legendre(nodes) {
        let u = 0.5 * (x + 1.0);
        let s = (1.0 - u * u).sqrt();
        for j in 0..azimuths {
            let phi = TAU * (j as f64 + 0.5) / azimuths as f64;
            let r = [s * phi.cos(), s * phi.sin(), u];
            let proj = r[0] * b[0] + r[1] * b[1] + r[2] * b[2];
            let sign = if proj >= 0.0 { 0.5 } else { -0.5 };
            // hemisphere area 2π; weights: 0.5·w in u, TAU/azimuths in φ
            total += 0.5 * w * (TAU / azimuths as f64) * sign / TAU;
        }
    }
    total
}
