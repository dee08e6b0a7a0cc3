//! Small numerically stable scalar kernels shared across the crate.
//!
//! Everything here is about keeping full relative precision in regimes
//! where the naive expression cancels or under/overflows: survival
//! probabilities of the form `1 - exp(-s)` with `s` anywhere between
//! 1e-300 and 1e4, log-domain evaluation of the same, and the
//! compensated Lévy kernel `exp(-u) - 1 + u`.

/// `1 - exp(-s)` with full relative precision for small `s`.
///
/// `s` must be nonnegative; the result is in `[0, 1]`.
pub fn one_minus_exp_neg(s: f64) -> f64 {
    debug_assert!(s >= 0.0 || s.is_nan());
    -(-s).exp_m1()
}

/// `ln(1 - exp(-s))` for `s > 0`.
///
/// Switches between `ln(-expm1(-s))` and `ln1p(-exp(-s))` at `s = ln 2`,
/// which keeps the worst-case relative error near machine epsilon on
/// both sides (the usual `log1mexp` split).
pub fn ln_one_minus_exp_neg(s: f64) -> f64 {
    if s <= 0.0 {
        return f64::NAN;
    }
    if s < std::f64::consts::LN_2 {
        (-(-s).exp_m1()).ln()
    } else {
        (-(-s).exp()).ln_1p()
    }
}

/// `ln(1 - exp(-s))` where only `ln s` is available.
///
/// Needed when `s` itself underflows f64 (survival probabilities at very
/// large times). For representable `s` this agrees with
/// [`ln_one_minus_exp_neg`]; for `ln_s` below the representable range it
/// uses `ln(1 - e^{-s}) = ln s + ln(1 - s/2 + ...) ≈ ln s - s/2`.
pub fn ln_one_minus_exp_neg_from_ln(ln_s: f64) -> f64 {
    if ln_s > -30.0 {
        // s is comfortably representable.
        ln_one_minus_exp_neg(ln_s.exp())
    } else {
        // 1 - e^{-s} = s(1 - s/2 + s^2/6 - ...); the correction is below
        // resolution once s < 1e-13.
        let s = ln_s.exp(); // may underflow to 0, which is fine here
        ln_s + (-0.5 * s).ln_1p()
    }
}

/// `ln(1 + exp(s))`, the softplus function, stable for all `s`.
pub fn softplus(s: f64) -> f64 {
    if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn logsumexp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Compensated Lévy kernel `exp(-u) - 1 + u` for `u >= 0`.
///
/// The leading terms cancel to `u^2/2` as `u -> 0`, so the direct
/// expression loses all precision below `u ~ 1e-8`; a short Taylor series
/// takes over there.
pub fn exp_neg_m1_plus(u: f64) -> f64 {
    debug_assert!(u >= 0.0 || u.is_nan());
    if u < 1e-4 {
        // u^2/2 - u^3/6 + u^4/24 - u^5/120, relative error < 1e-19 here
        let u2 = u * u;
        u2 * (0.5 - u * (1.0 / 6.0) + u2 * (1.0 / 24.0) - u2 * u * (1.0 / 120.0))
    } else {
        (-u).exp_m1() + u
    }
}

/// `1 - exp(-u)` companion to the kernel above; plain `-expm1` already
/// has full precision, provided the caller does not write `1.0 - (-u).exp()`.
pub fn one_minus_exp_neg_kernel(u: f64) -> f64 {
    one_minus_exp_neg(u)
}
