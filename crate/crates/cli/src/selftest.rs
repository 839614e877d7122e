//! Exhaustive five-way agreement over small groups, plus seeded random checks
//! of the Fourier identities.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use tilespec_core::fourier::{dft, idft, poisson_sides, weil_check};
use tilespec_core::group::haar_weights;
use tilespec_core::lattice::all_subgroups;
use tilespec_core::tiling::{check_all, InstanceDump};
use tilespec_core::{
    Arithmetic, FunctionOnGroup, Group, MeasureConvention, Rational, SetOnGroup, Side, Subgroup,
};

pub const DEFAULT_SEED: u64 = 0x7115_5eed;
/// Above this order the subset count makes exhaustive runs impractical.
pub const MAX_EXHAUSTIVE_ORDER: u64 = 16;

/// Every group up to `max_order` with all of its subgroups.
pub fn corpus(max_order: u64) -> Vec<(Group, Vec<Subgroup>)> {
    Group::all_up_to(max_order)
        .into_iter()
        .map(|g| {
            let subs = all_subgroups(&g, Side::Primal);
            (g, subs)
        })
        .collect()
}

/// Nonempty subset with bit pattern `mask`.
pub fn subset(group: &Group, mask: u64) -> SetOnGroup {
    SetOnGroup::from_indices(group, (0..group.size()).filter(|k| mask >> k & 1 == 1))
}

/// Verdicts of every `(G, H, Omega)` in corpus order.
pub fn verdicts(max_order: u64, mode: Arithmetic) -> Vec<[bool; 5]> {
    let corpus = corpus(max_order);
    let pairs: Vec<(&Group, &Subgroup)> = corpus
        .iter()
        .flat_map(|(g, subs)| subs.iter().map(move |h| (g, h)))
        .collect();
    pairs
        .par_iter()
        .map(|(g, h)| {
            let mc = MeasureConvention::counting(g);
            (1..1u64 << g.size())
                .map(|mask| {
                    check_all(&subset(g, mask), h, &mc, mode)
                        .expect("valid instance")
                        .holds()
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FiveWay {
    pub groups: usize,
    pub subgroups: usize,
    pub instances: u64,
    pub tiling_pairs: u64,
    pub defects: Vec<InstanceDump>,
}

pub fn five_way(max_order: u64, mode: Arithmetic) -> FiveWay {
    let corpus = corpus(max_order);
    let pairs: Vec<(&Group, &Subgroup)> = corpus
        .iter()
        .flat_map(|(g, subs)| subs.iter().map(move |h| (g, h)))
        .collect();
    let parts: Vec<(u64, u64, Vec<InstanceDump>)> = pairs
        .par_iter()
        .map(|(g, h)| {
            let mc = MeasureConvention::counting(g);
            let (mut n, mut tiles, mut defects) = (0, 0, Vec::new());
            for mask in 1..1u64 << g.size() {
                let r = check_all(&subset(g, mask), h, &mc, mode).expect("valid instance");
                n += 1;
                if r.all_true() {
                    tiles += 1;
                }
                if let Some(d) = r.defect {
                    defects.push(d);
                }
            }
            (n, tiles, defects)
        })
        .collect();
    let mut out = FiveWay {
        groups: corpus.len(),
        subgroups: pairs.len(),
        ..FiveWay::default()
    };
    for (n, t, d) in parts {
        out.instances += n;
        out.tiling_pairs += t;
        out.defects.extend(d);
    }
    out
}

pub fn random_function(
    rng: &mut ChaCha8Rng,
    group: &Group,
    mc: MeasureConvention,
) -> FunctionOnGroup {
    let values = (0..group.size())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    FunctionOnGroup::new(group, Side::Primal, values, mc).expect("length matches")
}

pub fn random_weight(rng: &mut ChaCha8Rng, group: &Group) -> Rational {
    *[
        Rational::from_integer(1),
        Rational::new(1, group.order() as i64),
        Rational::new(7, 3),
    ]
    .choose(rng)
    .expect("nonempty")
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Identities {
    pub samples: usize,
    pub weil_max: f64,
    pub poisson_max: f64,
    pub plancherel_max_rel: f64,
    pub roundtrip_max_rel: f64,
}

/// Seeded Weil/Poisson samples on `|G| <= 24` and Plancherel samples on `|G| <= 64`.
pub fn identities(seed: u64, samples: usize) -> Identities {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = corpus(24);
    let large = Group::all_up_to(64);
    let mut out = Identities {
        samples,
        ..Identities::default()
    };
    for _ in 0..samples {
        let (g, subs) = small.choose(&mut rng).expect("nonempty corpus");
        let h = subs.choose(&mut rng).expect("a group has subgroups");
        let mc = haar_weights(g, random_weight(&mut rng, g)).expect("small weights");
        let f = random_function(&mut rng, g, mc);
        let (l, r) = weil_check(&f, h).expect("primal data");
        out.weil_max = out.weil_max.max((l - r).norm());
        for (l, r) in poisson_sides(&f, h).expect("primal data") {
            out.poisson_max = out.poisson_max.max((l - r).norm());
        }

        let g = large.choose(&mut rng).expect("nonempty corpus");
        let mc = haar_weights(g, random_weight(&mut rng, g)).expect("small weights");
        let f = random_function(&mut rng, g, mc);
        let ff = dft(&f).expect("primal data");
        let rel = (f.norm_sqr() - ff.norm_sqr()).abs() / f.norm_sqr();
        out.plancherel_max_rel = out.plancherel_max_rel.max(rel);
        let back = idft(&ff).expect("dual data");
        let diff: f64 = back
            .values()
            .iter()
            .zip(f.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        out.roundtrip_max_rel = out.roundtrip_max_rel.max((diff / f.norm_sqr()).sqrt());
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub max_order: u64,
    pub mode: Arithmetic,
    pub seed: u64,
    pub five_way: FiveWay,
    pub identities: Identities,
    pub passed: bool,
}

pub fn run(max_order: u64, mode: Arithmetic, seed: u64, samples: usize) -> Summary {
    let five_way = five_way(max_order, mode);
    let identities = identities(seed, samples);
    let passed = five_way.defects.is_empty()
        && identities.weil_max <= 1e-9
        && identities.poisson_max <= 1e-9
        && identities.plancherel_max_rel <= 1e-10
        && identities.roundtrip_max_rel <= 1e-10;
    Summary {
        max_order,
        mode,
        seed,
        five_way,
        identities,
        passed,
    }
}
