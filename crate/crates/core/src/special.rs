//! Gamma-family special functions used for closed-form moments and tail bounds.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

const ITMAX: usize = 500;
const EPS: f64 = 1.0e-16;
const FPMIN: f64 = 1.0e-300;

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Volume of the unit ball in dimension `n`, `pi^(n/2) / Gamma(n/2 + 1)`.
pub fn unit_ball_volume(n: f64) -> f64 {
    (0.5 * n * PI.ln() - ln_gamma(0.5 * n + 1.0)).exp()
}

/// Regularized upper incomplete gamma `Q(s, x) = Gamma(s, x) / Gamma(s)`.
pub fn gamma_q(s: f64, x: f64) -> f64 {
    debug_assert!(s > 0.0);
    if x <= 0.0 {
        return 1.0;
    }
    if x < s + 1.0 {
        1.0 - gamma_p_series(s, x)
    } else {
        gamma_q_continued_fraction(s, x)
    }
}

/// Regularized lower incomplete gamma `P(s, x)`.
pub fn gamma_p(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < s + 1.0 {
        gamma_p_series(s, x)
    } else {
        1.0 - gamma_q_continued_fraction(s, x)
    }
}

fn gamma_p_series(s: f64, x: f64) -> f64 {
    let mut ap = s;
    let mut del = 1.0 / s;
    let mut sum = del;
    for _ in 0..ITMAX {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + s * x.ln() - ln_gamma(s)).exp()
}

// Modified Lentz evaluation of the continued fraction for Q.
fn gamma_q_continued_fraction(s: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=ITMAX {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + s * x.ln() - ln_gamma(s)).exp() * h
}

/// `int_0^inf r^m exp(-sigma r^q) dr = Gamma((m+1)/q) / (q sigma^((m+1)/q))`.
pub fn power_exp_integral(m: f64, sigma: f64, q: f64) -> f64 {
    let s = (m + 1.0) / q;
    (ln_gamma(s) - q.ln() - s * sigma.ln()).exp()
}

/// `int_R^inf r^m exp(-sigma r^q) dr`, the upper tail of [`power_exp_integral`].
pub fn power_exp_tail(m: f64, sigma: f64, q: f64, from: f64) -> f64 {
    let s = (m + 1.0) / q;
    let x = sigma * from.max(0.0).powf(q);
    let tail = gamma_q(s, x);
    if tail <= 0.0 {
        return 0.0;
    }
    (ln_gamma(s) + tail.ln() - q.ln() - s * sigma.ln()).exp()
}
