//! Gauss–Kronrod rules and a globally adaptive integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// An embedded Gauss–Kronrod pair on [-1, 1].
///
/// `nodes` holds the non-negative Kronrod abscissae in decreasing order,
/// ending with 0. Gauss nodes are the odd-indexed entries.
#[derive(Debug)]
pub struct KronrodRule {
    nodes: &'static [f64],
    kronrod_weights: &'static [f64],
    gauss_weights: &'static [f64],
    /// Gauss rule includes the centre node (odd Gauss order).
    gauss_has_center: bool,
}

const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_937_180,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

pub static GK15: KronrodRule = KronrodRule {
    nodes: &XGK15,
    kronrod_weights: &WGK15,
    gauss_weights: &WG7,
    gauss_has_center: true,
};

pub static GK21: KronrodRule = KronrodRule {
    nodes: &XGK21,
    kronrod_weights: &WGK21,
    gauss_weights: &WG10,
    gauss_has_center: false,
};

impl KronrodRule {
    /// Rule with the given number of Kronrod points (15 or 21).
    pub fn with_order(order: usize) -> Option<&'static KronrodRule> {
        match order {
            15 => Some(&GK15),
            21 => Some(&GK21),
            _ => None,
        }
    }

    pub fn order(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    /// Integrate `f` over [a, b]; returns (Kronrod estimate, |Kronrod − Gauss|).
    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> (f64, f64) {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let last = self.nodes.len() - 1;
        let fc = f(center);
        let mut kronrod = fc * self.kronrod_weights[last];
        let mut gauss = if self.gauss_has_center {
            fc * self.gauss_weights[self.gauss_weights.len() - 1]
        } else {
            0.0
        };
        for (j, (&x, &wk)) in self.nodes[..last]
            .iter()
            .zip(&self.kronrod_weights[..last])
            .enumerate()
        {
            let dx = half * x;
            let pair = f(center - dx) + f(center + dx);
            kronrod += wk * pair;
            if j % 2 == 1 {
                gauss += self.gauss_weights[j / 2] * pair;
            }
        }
        (kronrod * half, ((kronrod - gauss) * half).abs())
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Outcome of [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveEstimate {
    pub value: f64,
    pub error: f64,
    pub segments: usize,
    pub converged: bool,
}

/// Globally adaptive GK15 integration of `f` over [a, b].
///
/// Bisects the segment with the largest error estimate until the summed
/// estimate drops below `abs_tol` or `max_segments` is reached.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_segments: usize,
) -> AdaptiveEstimate {
    let rule = &GK15;
    let (value, error) = rule.apply(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total_error = error;

    while total_error > abs_tol && heap.len() < max_segments {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Segment cannot be split further in floating point.
            heap.push(worst);
            break;
        }
        let (v1, e1) = rule.apply(&mut f, worst.a, mid);
        let (v2, e2) = rule.apply(&mut f, mid, worst.b);
        total_error += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }

    // Re-sum to shed drift from the incremental updates.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    AdaptiveEstimate {
        value,
        error,
        segments: heap.len(),
        converged: error <= abs_tol,
    }
}
