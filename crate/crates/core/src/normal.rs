//! Standard normal density, distribution and quantile functions.

use crate::error::PricingError;
use crate::float::{c, Float};
use crate::special::erfc;

/// 1/sqrt(2*pi)
pub(crate) const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;
/// sqrt(2*pi)
pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_502_4;

/// Standard normal density.
#[inline]
pub fn norm_pdf<T: Float>(x: T) -> T {
    c::<T>(FRAC_1_SQRT_2PI) * (c::<T>(-0.5) * x * x).exp()
}

/// 1/sqrt(2) minus its nearest `f64`.
const FRAC_1_SQRT_2_LO: f64 = -4.833_646_656_726_457e-17;

/// Standard normal CDF, computed as `erfc(-x/sqrt(2))/2` so both tails keep
/// their relative accuracy.
///
/// The rounding error of `x/sqrt(2)` is amplified by `2 z^2` in the lower
/// tail; it is carried separately and applied as a first-order correction.
#[inline]
pub fn norm_cdf<T: Float>(x: T) -> T {
    let hi = T::FRAC_1_SQRT_2();
    let z = x * hi;
    let w = -z;
    let tail = erfc(w);
    if w <= T::zero() {
        return c::<T>(0.5) * tail;
    }
    let lo = c::<T>((std::f64::consts::FRAC_1_SQRT_2 - hi.to_f64().unwrap_or_default()) + FRAC_1_SQRT_2_LO);
    let dz = x.mul_add(hi, -z) + x * lo;
    // 2/sqrt(pi) / erfcx(w), to within a few percent
    let scale = w + (w * w + c::<T>(4.0 / std::f64::consts::PI)).sqrt();
    c::<T>(0.5) * tail * (T::one() + dz * scale)
}

// Wichura's PPND16 (AS241) coefficients, numerator then denominator.
const CENTRAL_NUM: [f64; 8] = [
    3.387_132_872_796_366_608_0e0,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
const CENTRAL_DEN: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083_0e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061_0e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561_0e3,
];
const NEAR_NUM: [f64; 8] = [
    1.423_437_110_749_683_577_34e0,
    4.630_337_846_156_545_295_90e0,
    5.769_497_221_460_691_405_50e0,
    3.647_848_324_763_204_605_04e0,
    1.270_458_252_452_368_382_58e0,
    2.417_807_251_774_506_117_70e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_40e-4,
];
const NEAR_DEN: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87e0,
    1.676_384_830_183_803_849_40e0,
    6.897_673_349_851_000_045_50e-1,
    1.481_039_764_274_800_745_90e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946_00e-4,
    1.050_750_071_644_416_843_24e-9,
];
const FAR_NUM: [f64; 8] = [
    6.657_904_643_501_103_777_20e0,
    5.463_784_911_164_114_369_90e0,
    1.784_826_539_917_291_335_80e0,
    2.965_605_718_285_048_912_30e-1,
    2.653_218_952_657_612_309_30e-2,
    1.242_660_947_388_078_438_60e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const FAR_DEN: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_90e-1,
    1.369_298_809_227_358_053_10e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591_00e-4,
    1.846_318_317_510_054_681_80e-5,
    1.421_511_758_316_445_888_70e-7,
    2.044_263_103_389_939_785_64e-15,
];

#[inline]
fn horner<T: Float>(coeffs: &[f64; 8], x: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &k| acc * x + c(k))
}

#[inline]
fn rational<T: Float>(num: &[f64; 8], den: &[f64; 8], x: T) -> T {
    horner(num, x) / horner(den, x)
}

/// Raw AS241 quantile, ~1e-16 relative accuracy over the whole double range.
fn ppnd16<T: Float>(p: T) -> T {
    let half = c::<T>(0.5);
    let q = p - half;
    if q.abs() <= c(0.425) {
        let r = c::<T>(0.180_625) - q * q;
        return q * rational(&CENTRAL_NUM, &CENTRAL_DEN, r);
    }
    let tail = if q < T::zero() { p } else { T::one() - p };
    let r = (-tail.ln()).sqrt();
    let v = if r <= c(5.0) {
        rational(&NEAR_NUM, &NEAR_DEN, r - c(1.6))
    } else {
        rational(&FAR_NUM, &FAR_DEN, r - c(5.0))
    };
    if q < T::zero() {
        -v
    } else {
        v
    }
}

/// Inverse of [`norm_cdf`]: AS241 followed by one Halley polish step.
pub fn inv_norm_cdf<T: Float>(p: T) -> Result<T, PricingError> {
    if !(p > T::zero() && p < T::one()) {
        return Err(PricingError::domain(format!("probability {p} outside (0, 1)")));
    }
    let z = ppnd16(p);
    // Polish on the smaller tail so the residual keeps its relative accuracy.
    let (target, sign) = if z > T::zero() { (T::one() - p, -T::one()) } else { (p, T::one()) };
    let zt = z * sign;
    let density = norm_pdf(zt);
    if density <= T::zero() {
        return Ok(z);
    }
    let err = norm_cdf(zt) - target;
    let u = err / density;
    let zt = zt - u / (T::one() + c::<T>(0.5) * zt * u);
    Ok(zt * sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn cdf_reference_values() {
        assert_eq!(norm_cdf(0.0), 0.5);
        let table = [
            (0.1, 0.539_827_837_277_028_983_67),
            (-1.0, 0.158_655_253_931_457_051_41),
            (-5.0, 2.866_515_718_791_939_116_7e-7),
            (-10.0, 7.619_853_024_160_526_066e-24),
            (-20.0, 2.753_624_118_606_233_695_1e-89),
            (-37.0, 5.725_571_222_524_576_822_7e-300),
            (2.0, 0.977_249_868_051_820_792_8),
        ];
        for (x, want) in table {
            assert!(rel(norm_cdf(x), want) <= 1e-15, "Phi({x}) = {:e}", norm_cdf(x));
        }
    }

    #[test]
    fn pdf_reference_values() {
        assert!(rel(norm_pdf(0.0), 0.398_942_280_401_432_677_94) <= 1e-15);
        assert!(rel(norm_pdf(0.1), 0.396_952_547_477_011_765_29) <= 1e-15);
        assert!(rel(norm_pdf(3.0), 0.004_431_848_411_938_007_175_6) <= 1e-15);
        assert_eq!(norm_pdf(1.7), norm_pdf(-1.7));
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(inv_norm_cdf(0.5f64).unwrap(), 0.0);
        let z = inv_norm_cdf(0.539_827_837_277_028_983_67f64).unwrap();
        assert!((z - 0.1).abs() <= 1e-12);
        // p and 1 - p both exact in binary
        for p in [0.25, 0.125, 0.031_25, 0.5 - 1.0 / 1024.0] {
            assert_eq!(inv_norm_cdf(p).unwrap(), -inv_norm_cdf(1.0 - p).unwrap());
        }
    }

    #[test]
    fn quantile_rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(inv_norm_cdf(p), Err(PricingError::Domain(_))));
        }
    }

    proptest! {
        #[test]
        fn cdf_reflection(x in -37.0f64..37.0) {
            let sum = norm_cdf(x) + norm_cdf(-x);
            prop_assert!((sum - 1.0).abs() <= 2.0 * f64::EPSILON);
        }

        #[test]
        fn quantile_inverts_cdf(x in -6.0f64..6.0) {
            let p = norm_cdf(x);
            let back = inv_norm_cdf(p).unwrap();
            // Above the median p carries an absolute rounding error of one ulp,
            // which no inverse can undo.
            let conditioning = if x > 0.0 { f64::EPSILON / norm_pdf(x) } else { 0.0 };
            prop_assert!((back - x).abs() <= 1e-12 + conditioning, "x={} back={}", x, back);
        }

        #[test]
        fn cdf_of_quantile(p in 1e-12f64..0.999_999) {
            let z = inv_norm_cdf(p).unwrap();
            prop_assert!(((norm_cdf(z) - p) / p).abs() <= 1e-13);
        }

        #[test]
        fn quantile_symmetry(p in 1e-6f64..0.5) {
            let lo = inv_norm_cdf(p).unwrap();
            let hi = inv_norm_cdf(1.0 - p).unwrap();
            // 1 - p is rounded, hence the loose bound
            prop_assert!((lo + hi).abs() <= 1e-9 * (1.0 + lo.abs()));
        }
    }
}
