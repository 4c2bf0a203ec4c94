//! Error function family after W. J. Cody's rational Chebyshev approximations.
//!
//! `erfc` and `erfcx` keep full relative accuracy far into the tail, which is
//! what the normal CDF and the normalized Black function rely on.

use crate::float::{c, Float};

const THRESH: f64 = 0.46875;
const XSMALL: f64 = 1.11e-16;
const XBIG: f64 = 26.543;
const XHUGE: f64 = 6.71e7;
const XMAX: f64 = 2.53e307;
const XNEG: f64 = -26.628;
/// 1/sqrt(pi)
const SQRPI: f64 = 5.641_895_835_477_562_869_5e-1;

const A: [f64; 5] = [
    3.161_123_743_870_565_60e00,
    1.138_641_541_510_501_56e02,
    3.774_852_376_853_020_21e02,
    3.209_377_589_138_469_47e03,
    1.857_777_061_846_031_53e-1,
];
const B: [f64; 4] = [
    2.360_129_095_234_412_09e01,
    2.440_246_379_344_441_73e02,
    1.282_616_526_077_372_28e03,
    2.844_236_833_439_170_62e03,
];
const C: [f64; 9] = [
    5.641_884_969_886_700_89e-1,
    8.883_149_794_388_375_94e00,
    6.611_919_063_714_162_95e01,
    2.986_351_381_974_001_31e02,
    8.819_522_212_417_690_90e02,
    1.712_047_612_634_070_58e03,
    2.051_078_377_826_071_47e03,
    1.230_339_354_797_997_25e03,
    2.153_115_354_744_038_46e-8,
];
const D: [f64; 8] = [
    1.574_492_611_070_983_47e01,
    1.176_939_508_913_124_99e02,
    5.371_811_018_620_098_58e02,
    1.621_389_574_566_690_19e03,
    3.290_799_235_733_459_63e03,
    4.362_619_090_143_247_16e03,
    3.439_367_674_143_721_64e03,
    1.230_339_354_803_749_42e03,
];
const P: [f64; 6] = [
    3.053_266_349_612_323_44e-1,
    3.603_448_999_498_044_39e-1,
    1.257_817_261_112_292_46e-1,
    1.608_378_514_874_227_66e-2,
    6.587_491_615_298_378_03e-4,
    1.631_538_713_730_209_78e-2,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822_42e00,
    1.872_952_849_923_460_47e00,
    5.279_051_029_514_284_12e-1,
    6.051_834_131_244_131_91e-2,
    2.335_204_976_268_691_85e-3,
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Erf,
    Erfc,
    Erfcx,
}

/// `exp(-y*y)` evaluated with the split `y = ysq + del` so the rounding of the
/// square does not leak into the result.
#[inline]
fn exp_neg_square<T: Float>(y: T) -> T {
    let sixteen = c::<T>(16.0);
    let ysq = (y * sixteen).trunc() / sixteen;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

fn calerf<T: Float>(x: T, kind: Kind) -> T {
    if x.is_nan() {
        return x;
    }
    let y = x.abs();
    let mut result;
    if y <= c(THRESH) {
        let ysq = if y > c(XSMALL) { y * y } else { T::zero() };
        let mut xnum = c::<T>(A[4]) * ysq;
        let mut xden = ysq;
        for i in 0..3 {
            xnum = (xnum + c(A[i])) * ysq;
            xden = (xden + c(B[i])) * ysq;
        }
        result = x * (xnum + c(A[3])) / (xden + c(B[3]));
        if kind != Kind::Erf {
            result = T::one() - result;
        }
        if kind == Kind::Erfcx {
            result = ysq.exp() * result;
        }
        return result;
    } else if y <= c(4.0) {
        let mut xnum = c::<T>(C[8]) * y;
        let mut xden = y;
        for i in 0..7 {
            xnum = (xnum + c(C[i])) * y;
            xden = (xden + c(D[i])) * y;
        }
        result = (xnum + c(C[7])) / (xden + c(D[7]));
        if kind != Kind::Erfcx {
            result = exp_neg_square(y) * result;
        }
    } else {
        result = T::zero();
        let mut saturated = false;
        if y >= c(XBIG) {
            if kind != Kind::Erfcx || y >= c(XMAX) {
                saturated = true;
            }
            if y >= c(XHUGE) {
                result = c::<T>(SQRPI) / y;
                saturated = true;
            }
        }
        if !saturated {
            let ysq = T::one() / (y * y);
            let mut xnum = c::<T>(P[5]) * ysq;
            let mut xden = ysq;
            for i in 0..4 {
                xnum = (xnum + c(P[i])) * ysq;
                xden = (xden + c(Q[i])) * ysq;
            }
            result = ysq * (xnum + c(P[4])) / (xden + c(Q[4]));
            result = (c::<T>(SQRPI) - result) / y;
            if kind != Kind::Erfcx {
                result = exp_neg_square(y) * result;
            }
        }
    }

    let half = c::<T>(0.5);
    match kind {
        Kind::Erf => {
            result = (half - result) + half;
            if x < T::zero() {
                result = -result;
            }
        }
        Kind::Erfc => {
            if x < T::zero() {
                result = c::<T>(2.0) - result;
            }
        }
        Kind::Erfcx => {
            if x < T::zero() {
                if x < c(XNEG) {
                    result = T::infinity();
                } else {
                    let e = T::one() / exp_neg_square(x);
                    result = (e + e) - result;
                }
            }
        }
    }
    result
}

/// Error function.
pub fn erf<T: Float>(x: T) -> T {
    calerf(x, Kind::Erf)
}

/// Complementary error function `1 - erf(x)`, accurate in relative terms for large `x`.
pub fn erfc<T: Float>(x: T) -> T {
    calerf(x, Kind::Erfc)
}

/// Scaled complementary error function `exp(x^2) * erfc(x)`.
pub fn erfcx<T: Float>(x: T) -> T {
    calerf(x, Kind::Erfcx)
}
