//! 60-digit decimal evaluation of the model formulas, independent of the
//! f64 code paths in `royal_road`.

use dashu_float::DBig;

pub const DIGITS: usize = 60;

pub fn big(x: u64) -> DBig {
    DBig::from(x).with_precision(DIGITS).value()
}

pub fn ratio(num: u64, den: u64) -> DBig {
    big(num) / big(den)
}

pub fn to_f64(x: &DBig) -> f64 {
    x.to_f64().value()
}

fn pow(x: &DBig, e: usize) -> DBig {
    let mut acc = big(1);
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// `(α(2μ - α))² / μ⁴`
pub fn p_sel(alpha: u64, mu: u64) -> DBig {
    let x = big(alpha * (2 * mu - alpha));
    pow(&x, 2) / pow(&big(mu), 4)
}

/// `(M - 2l)(n + κM + 2l) / (2n²)`
pub fn p_swap(n: u64, m: u64, kappa: u64, l: u64) -> DBig {
    big((m - 2 * l) * (n + kappa * m + 2 * l)) / big(2 * n * n)
}

/// `1 - (1/μ) Σ_α (1 - p_sel p_swap)^{λ/2}`, evaluated by direct subtraction
/// at 60 digits.
pub fn p_success(n: u64, m: u64, mu: u64, lambda: u64, kappa: u64, l: u64) -> DBig {
    let swap = p_swap(n, m, kappa, l);
    let mut total = big(0);
    for alpha in 1..=mu {
        let fail = big(1) - p_sel(alpha, mu) * &swap;
        total += pow(&fail, (lambda / 2) as usize);
    }
    big(1) - total / big(mu)
}

/// Exact expected hitting time with the bin index running over
/// `offset..offset + K`.
pub fn exact_expected_time(n: u64, k: u64, m: u64, mu: u64, lambda: u64, offset: u64) -> DBig {
    let mut total = big(0);
    for kappa in offset..offset + k {
        for l in 0..m / 2 {
            total += big(1) / p_success(n, m, mu, lambda, kappa, l);
        }
    }
    total
}

/// Euler–Mascheroni constant from the Euler–Maclaurin series
/// `γ = H_N - ln N - 1/(2N) + Σ B₂ₖ / (2k N²ᵏ)` at N = 100.
pub fn euler_gamma() -> DBig {
    const N: u64 = 100;
    // B₂ₖ for k = 1..10 as (numerator, denominator, negative)
    const BERNOULLI: [(u64, u64, bool); 10] = [
        (1, 6, false),
        (1, 30, true),
        (1, 42, false),
        (1, 30, true),
        (5, 66, false),
        (691, 2730, true),
        (7, 6, false),
        (3617, 510, true),
        (43867, 798, false),
        (174611, 330, true),
    ];
    let mut h = big(0);
    for i in 1..=N {
        h += ratio(1, i);
    }
    let n = big(N);
    let mut g = h - n.ln() - ratio(1, 2 * N);
    for (k, &(num, den, negative)) in BERNOULLI.iter().enumerate() {
        let two_k = 2 * (k as u64 + 1);
        let term = ratio(num, den) / (big(two_k) * pow(&n, two_k as usize));
        g = if negative { g - term } else { g + term };
    }
    g
}

pub fn ln2() -> DBig {
    big(2).ln()
}
