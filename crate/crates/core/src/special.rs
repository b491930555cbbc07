//! Error function and standard normal helpers.
//!
//! `erf`/`erfc` follow Cody's rational Chebyshev approximations (the CALERF
//! scheme), accurate to a few ulps over the whole double range. The normal
//! quantile uses Acklam's rational approximation polished by two Halley
//! steps against the `erfc`-based cdf, which brings it to full double
//! precision. Everything downstream (quantiles, cut points, profiles) leans
//! on these four functions, so they are tested against independently
//! computed high-precision values.

pub const SQRT_2PI: f64 = 2.5066282746310002;
pub const LN_SQRT_2PI: f64 = 0.9189385332046727;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

// Cody, "Rational Chebyshev approximation for the error function" (CALERF).
const A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
const C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
const P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];
const SQRPI: f64 = 5.6418958354775628695e-1; // 1/sqrt(pi)

/// erf for |x| <= 0.46875.
fn erf_small(x: f64) -> f64 {
    let ysq = if x.abs() > 1e-300 { x * x } else { 0.0 };
    let mut xnum = A[4] * ysq;
    let mut xden = ysq;
    for i in 0..3 {
        xnum = (xnum + A[i]) * ysq;
        xden = (xden + B[i]) * ysq;
    }
    x * (xnum + A[3]) / (xden + B[3])
}

/// erfc for 0.46875 <= y <= 4, y = |x|.
fn erfc_mid(y: f64) -> f64 {
    let mut xnum = C[8] * y;
    let mut xden = y;
    for i in 0..7 {
        xnum = (xnum + C[i]) * y;
        xden = (xden + D[i]) * y;
    }
    let result = (xnum + C[7]) / (xden + D[7]);
    // split the exponential to avoid cancellation in e^{-y^2}
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * result
}

/// erfc for y > 4, y = |x|.
fn erfc_large(y: f64) -> f64 {
    if y >= 26.6 {
        // underflows to zero well before double subnormals become an issue
        return 0.0;
    }
    let ysq = 1.0 / (y * y);
    let mut xnum = P[5] * ysq;
    let mut xden = ysq;
    for i in 0..4 {
        xnum = (xnum + P[i]) * ysq;
        xden = (xden + Q[i]) * ysq;
    }
    let mut result = ysq * (xnum + P[4]) / (xden + Q[4]);
    result = (SQRPI - result) / y;
    let yq = (y * 16.0).trunc() / 16.0;
    let del = (y - yq) * (y + yq);
    (-yq * yq).exp() * (-del).exp() * result
}

pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.46875 {
        erf_small(x)
    } else {
        let e = if y <= 4.0 { erfc_mid(y) } else { erfc_large(y) };
        if x > 0.0 {
            1.0 - e
        } else {
            e - 1.0
        }
    }
}

pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    let e = if y <= 0.46875 {
        return 1.0 - erf_small(x);
    } else if y <= 4.0 {
        erfc_mid(y)
    } else {
        erfc_large(y)
    };
    if x > 0.0 {
        e
    } else {
        2.0 - e
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal cdf, absolute error a few ulps.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal survival function `1 - cdf(x)`, accurate in the upper tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Difference `cdf(b) - cdf(a)` for `a <= b` without tail cancellation.
pub fn normal_cdf_diff(a: f64, b: f64) -> f64 {
    debug_assert!(!(a > b));
    if a == b {
        return 0.0;
    }
    // pick whichever side keeps both arguments away from their saturated end
    let d = if a + b > 0.0 {
        normal_sf(a) - normal_sf(b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    };
    d.max(0.0)
}

// Acklam's inverse normal cdf coefficients.
const IA: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const IB: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const IC: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const ID: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];

fn acklam(p: f64) -> f64 {
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((IC[0] * q + IC[1]) * q + IC[2]) * q + IC[3]) * q + IC[4]) * q + IC[5])
            / ((((ID[0] * q + ID[1]) * q + ID[2]) * q + ID[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((IA[0] * r + IA[1]) * r + IA[2]) * r + IA[3]) * r + IA[4]) * r + IA[5]) * q
            / (((((IB[0] * r + IB[1]) * r + IB[2]) * r + IB[3]) * r + IB[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((IC[0] * q + IC[1]) * q + IC[2]) * q + IC[3]) * q + IC[4]) * q + IC[5])
            / ((((ID[0] * q + ID[1]) * q + ID[2]) * q + ID[3]) * q + 1.0)
    }
}

/// Inverse standard normal cdf on (0, 1).
///
/// Rational first guess refined by two Halley steps; the refined result is
/// good to the last ulp or two everywhere the cdf itself is.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "normal_quantile needs p in (0,1)");
    let mut x = acklam(p);
    for _ in 0..2 {
        // work against the smaller of cdf/sf to keep the residual well scaled
        let e = if p <= 0.5 {
            normal_cdf(x) - p
        } else {
            (1.0 - p) - normal_sf(x)
        };
        let u = e / normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}
