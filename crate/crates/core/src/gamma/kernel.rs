//! Walk kernels for rational-orbit scans.
//!
//! Deciding whether p/q is purely periodic means walking its orbit under
//! x -> beta*x - floor(beta*x) until the start recurs (pure), a Brent marker
//! recurs (eventually periodic), or the orbit reaches zero (finite). All
//! states are integer numerator vectors with denominator q, so every
//! comparison is exact; only the digit choice needs care.
//!
//! Three tiers perform the digit choice:
//!
//! * 8-wide AVX-512 lanes and a 4-wide scalar fallback, available only for
//!   the base of x^3 - x - 1 (digit set {0,1}): the value beta*x is compared
//!   against the threshold in 40-bit fixed point. The comparison carries a
//!   margin larger than the worst-case fixed-point error, so a decided digit
//!   is exact. Steps inside the margin roll back and re-run through the
//!   exact engine.
//! * the exact engine for every other base, every oversized denominator,
//!   and every rolled-back step.
//!
//! Walks that meet a rational state share their verdict with it: all states
//! of a pure cycle are purely periodic, and any state leading into a state
//! with known preperiod inherits a shifted preperiod. A per-denominator
//! context records these verdicts so no orbit is walked twice.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::expansion::{orbit_shape, OrbitEngine, OrbitState};
use crate::field::interval::RatInterval;
use crate::field::roots::refine_root;
use crate::field::BetaBase;
use crate::{Error, Result};

const SHIFT: u32 = 40;
/// Above this denominator the 40-bit lanes could overflow i64; use the engine.
const FAST_Q_LIMIT: i64 = 1 << 17;
/// Lane block length between event checks.
const BLOCK: u64 = 1 << 22;

/// Which walk implementation a scan uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Avx512,
    Scalar,
    Engine,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Avx512 => "avx512",
            KernelKind::Scalar => "scalar",
            KernelKind::Engine => "engine",
        }
    }
}

/// Certified 40-bit fixed-point floors of beta and beta^2.
///
/// The root enclosure is refined until the floor of each value times 2^40 is
/// the same at both interval ends, so b1 <= beta*2^40 < b1+1 is proven. The
/// lane margin (2*bound + 4) then dominates the worst-case error of the
/// fixed-point inner product: each multiplier is off by less than one unit,
/// and lane coordinates are bounded by `bound`.
#[derive(Debug, Clone, Copy)]
pub struct FixedConstants {
    pub b1: i64,
    pub b2: i64,
}

impl FixedConstants {
    /// Only the base of x^3 - x - 1 has a fast lane: its digit set is {0,1},
    /// so one threshold comparison decides the digit.
    pub fn for_base(base: &BetaBase) -> Option<FixedConstants> {
        if base.minpoly().coeffs() != [-1, -1, 0, 1].as_slice() {
            return None;
        }
        let coeffs = base.minpoly().rational_coeffs();
        let mut enc = base.beta_enclosure().clone();
        let mut bits = 96usize;
        loop {
            let tol = BigRational::new(BigInt::one(), BigInt::one() << bits);
            enc = refine_root(&coeffs, enc, &tol);
            let sq = enc.mul(&enc);
            if let (Some(b1), Some(b2)) = (unambiguous_floor(&enc), unambiguous_floor(&sq)) {
                return Some(FixedConstants { b1, b2 });
            }
            bits += 64;
        }
    }
}

fn unambiguous_floor(iv: &RatInterval) -> Option<i64> {
    let scale = BigRational::from_integer(BigInt::one() << (SHIFT as usize));
    let lo = (&iv.lo * &scale).floor().to_integer();
    let hi = (&iv.hi * &scale).floor().to_integer();
    (lo == hi).then(|| lo.to_i64().expect("fixed-point constant fits i64"))
}

/// Pick the fastest sound kernel for a base.
pub fn kernel_for(base: &BetaBase, force_engine: bool) -> (KernelKind, Option<FixedConstants>) {
    if force_engine {
        return (KernelKind::Engine, None);
    }
    match FixedConstants::for_base(base) {
        None => (KernelKind::Engine, None),
        Some(c) => {
            #[cfg(target_arch = "x86_64")]
            {
                if is_x86_feature_detected!("avx512dq") {
                    return (KernelKind::Avx512, Some(c));
                }
            }
            (KernelKind::Scalar, Some(c))
        }
    }
}

/// Verdict for one reduced fraction p/q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracStatus {
    Pure { period: u64 },
    Impure { preperiod: u64, period: u64 },
    /// The orbit reaches zero: the expansion is finite (and not pure).
    Finite { digits: u64 },
    /// The step budget ran out before the orbit closed.
    Undecided,
}

impl FracStatus {
    pub fn is_pure(self) -> bool {
        matches!(self, FracStatus::Pure { .. })
    }

    /// Number of distinct orbit states this verdict certifies.
    pub fn orbit_states(self) -> u64 {
        match self {
            FracStatus::Pure { period } => period,
            FracStatus::Impure { preperiod, period } => preperiod + period,
            FracStatus::Finite { digits } => digits,
            FracStatus::Undecided => 0,
        }
    }
}

/// Exact orbit classification of one start, with every same-denominator
/// rational met on the way: (orbit index, numerator), index 0 = the start.
#[derive(Debug, Clone)]
pub struct WalkOutcome {
    pub preperiod: u64,
    /// 0 when the orbit terminates at zero.
    pub period: u64,
    pub rationals: Vec<(u64, i64)>,
}

impl WalkOutcome {
    pub fn is_pure(&self) -> bool {
        self.preperiod == 0 && self.period > 0
    }
}

/// Walk p/denom with the exact engine: Brent cycle detection, then a replay
/// pass over the canonical preperiod+period prefix collecting rationals.
pub fn engine_walk(engine: &OrbitEngine, p: i64, budget: u64) -> Result<WalkOutcome> {
    if p == 0 {
        return Ok(WalkOutcome {
            preperiod: 0,
            period: 1,
            rationals: vec![(0, 0)],
        });
    }
    let s0 = engine.state_of_numerator(p);
    let shape = orbit_shape(engine, s0, budget)?;
    let (pre, per, span) = if shape.terminates {
        (shape.preperiod, 0, shape.preperiod)
    } else {
        (shape.preperiod, shape.period, shape.preperiod + shape.period)
    };
    let mut rationals = Vec::new();
    let mut s = s0;
    for idx in 0..span {
        if (s.0[1] | s.0[2]) == 0 && s.0[0] != 0 {
            rationals.push((idx, s.0[0]));
        }
        s = engine.step(s)?.0;
    }
    Ok(WalkOutcome {
        preperiod: pre,
        period: per,
        rationals,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Ev {
    Pure,
    Impure,
    Rational(i64),
    Stuck,
    Run,
}

struct Walk {
    s: [i64; 3],
    s0: [i64; 3],
    marker: [i64; 3],
    steps: u64,
    next_mark: u64,
    rats: Vec<(u64, i64)>,
    start: i64,
    live: bool,
}

impl Walk {
    fn new(p: i64) -> Self {
        let s0 = [p, 0, 0];
        Walk {
            s: s0,
            s0,
            marker: s0,
            steps: 0,
            next_mark: 1,
            rats: vec![(0, p)],
            start: p,
            live: true,
        }
    }

    /// Inert lane: the zero state is a fixed point of the lane map and the
    /// sentinels are unreachable, so a parked lane never fires an event.
    fn parked() -> Self {
        Walk {
            s: [0, 0, 0],
            s0: [-1, 0, 0],
            marker: [-1, 0, 0],
            steps: 0,
            next_mark: u64::MAX,
            rats: Vec::new(),
            start: -1,
            live: false,
        }
    }
}

fn event_of(s: [i64; 3], s0: [i64; 3], marker: [i64; 3]) -> Ev {
    if s == s0 {
        Ev::Pure
    } else if s == marker {
        Ev::Impure
    } else if (s[1] | s[2]) == 0 && s[0] != 0 {
        Ev::Rational(s[0])
    } else {
        Ev::Run
    }
}

macro_rules! lane_step {
    ($a0:ident, $a1:ident, $a2:ident, $q:ident, $hi:ident, $lo:ident, $bound:ident,
     $b1:ident, $b2:ident, $z:expr, $m:expr, $evmask:ident, $evs:ident, $lane:expr) => {{
        let t0 = $a2;
        let t1 = $a0 + $a2;
        let t2 = $a1;
        let v = (t0 << SHIFT) + t1 * $b1 + t2 * $b2;
        let d1 = v >= $hi;
        $a0 = t0 - if d1 { $q } else { 0 };
        $a1 = t1;
        $a2 = t2;
        // rare-path checks; the branches are almost never taken
        if (!d1 && v > $lo) || t1.abs() > $bound || t2.abs() > $bound {
            // roll back to the pre-step state; the caller re-runs this step exactly
            $a0 = t1 - t0;
            $a1 = t2;
            $a2 = t0;
            $evmask |= 1 << $lane;
            $evs[$lane] = Ev::Stuck;
        } else if $a0 == $z[0] && $a1 == $z[1] && $a2 == $z[2] {
            $evmask |= 1 << $lane;
            $evs[$lane] = Ev::Pure;
        } else if $a0 == $m[0] && $a1 == $m[1] && $a2 == $m[2] {
            $evmask |= 1 << $lane;
            $evs[$lane] = Ev::Impure;
        } else if ($a1 | $a2) == 0 && $a0 != 0 {
            $evmask |= 1 << $lane;
            $evs[$lane] = Ev::Rational($a0);
        }
    }};
}

/// Advance 4 walks in lockstep with hot state in locals. A lane that fires
/// `Stuck` has its offending step rolled back before return, so its digit
/// can be re-decided exactly by the caller.
#[inline(never)]
fn run4(ws: &mut [Walk; 4], c: FixedConstants, q: i64, bound: i64, block: u64) -> (u32, [Ev; 4]) {
    let b1 = c.b1;
    let b2 = c.b2;
    let qs = q << SHIFT;
    let margin = 2 * bound + 4;
    let hi = qs + margin;
    let lo = qs - margin;
    // no lane may cross its brent-marker boundary inside the block
    let mut len = block;
    for w in ws.iter() {
        len = len.min(w.next_mark - w.steps);
    }
    let [w0, w1, w2, w3] = ws;
    let (mut a0, mut a1, mut a2) = (w0.s[0], w0.s[1], w0.s[2]);
    let (mut b0, mut b1x, mut b2x) = (w1.s[0], w1.s[1], w1.s[2]);
    let (mut c0, mut c1, mut c2) = (w2.s[0], w2.s[1], w2.s[2]);
    let (mut d0, mut d1, mut d2) = (w3.s[0], w3.s[1], w3.s[2]);
    let mut evmask = 0u32;
    let mut evs = [Ev::Run; 4];
    let mut ran = 0u64;
    while ran < len {
        ran += 1;
        lane_step!(a0, a1, a2, q, hi, lo, bound, b1, b2, w0.s0, w0.marker, evmask, evs, 0);
        lane_step!(b0, b1x, b2x, q, hi, lo, bound, b1, b2, w1.s0, w1.marker, evmask, evs, 1);
        lane_step!(c0, c1, c2, q, hi, lo, bound, b1, b2, w2.s0, w2.marker, evmask, evs, 2);
        lane_step!(d0, d1, d2, q, hi, lo, bound, b1, b2, w3.s0, w3.marker, evmask, evs, 3);
        if evmask != 0 {
            break;
        }
    }
    w0.s = [a0, a1, a2];
    w1.s = [b0, b1x, b2x];
    w2.s = [c0, c1, c2];
    w3.s = [d0, d1, d2];
    for (i, w) in ws.iter_mut().enumerate() {
        w.steps += ran;
        if evs[i] == Ev::Stuck {
            // the stuck lane's state was rolled back; its step did not happen
            w.steps -= 1;
        }
        if w.steps == w.next_mark {
            w.marker = w.s;
            w.next_mark = w.next_mark.wrapping_mul(2);
        }
    }
    (evmask, evs)
}

#[cfg(target_arch = "x86_64")]
mod simd {
    use super::{Ev, FixedConstants, Walk, SHIFT};
    use std::arch::x86_64::*;

    /// Advance 8 walks in lockstep; returns (mask of event lanes, events).
    /// Stuck lanes are rolled back to their pre-step state before returning.
    #[target_feature(enable = "avx512f,avx512dq")]
    pub unsafe fn run8(
        ws: &mut [Walk; 8],
        c: FixedConstants,
        q: i64,
        bound: i64,
        block: u64,
    ) -> (u32, [Ev; 8]) {
        let mut len = block;
        for w in ws.iter() {
            len = len.min(w.next_mark - w.steps);
        }
        let mut buf = [[0i64; 8]; 9];
        for (i, w) in ws.iter().enumerate() {
            buf[0][i] = w.s[0];
            buf[1][i] = w.s[1];
            buf[2][i] = w.s[2];
            buf[3][i] = w.s0[0];
            buf[4][i] = w.s0[1];
            buf[5][i] = w.s0[2];
            buf[6][i] = w.marker[0];
            buf[7][i] = w.marker[1];
            buf[8][i] = w.marker[2];
        }
        let ld = |r: &[i64; 8]| _mm512_loadu_si512(r.as_ptr() as *const _);
        let mut a0 = ld(&buf[0]);
        let mut a1 = ld(&buf[1]);
        let mut a2 = ld(&buf[2]);
        let z0 = ld(&buf[3]);
        let z1 = ld(&buf[4]);
        let z2 = ld(&buf[5]);
        let m0 = ld(&buf[6]);
        let m1 = ld(&buf[7]);
        let m2 = ld(&buf[8]);
        let qv = _mm512_set1_epi64(q);
        let b1v = _mm512_set1_epi64(c.b1);
        let b2v = _mm512_set1_epi64(c.b2);
        let qs = q << SHIFT;
        let margin = 2 * bound + 4;
        let hiv = _mm512_set1_epi64(qs + margin);
        let lov = _mm512_set1_epi64(qs - margin);
        let boundv = _mm512_set1_epi64(bound);
        let mut ran = 0u64;
        let mut kstuck: __mmask8 = 0;
        let mut kpure: __mmask8 = 0;
        let mut kimp: __mmask8 = 0;
        let mut krat: __mmask8 = 0;
        let mut kd: __mmask8 = 0;
        while ran < len {
            ran += 1;
            let t0 = a2;
            let t1 = _mm512_add_epi64(a0, a2);
            let t2 = a1;
            let kb = _mm512_cmpgt_epi64_mask(_mm512_abs_epi64(t1), boundv)
                | _mm512_cmpgt_epi64_mask(_mm512_abs_epi64(t2), boundv);
            let v = _mm512_add_epi64(
                _mm512_add_epi64(_mm512_slli_epi64(t0, SHIFT), _mm512_mullo_epi64(t1, b1v)),
                _mm512_mullo_epi64(t2, b2v),
            );
            kd = _mm512_cmpge_epi64_mask(v, hiv);
            let km = _mm512_cmpgt_epi64_mask(v, lov) & !kd;
            a0 = _mm512_mask_sub_epi64(t0, kd, t0, qv);
            a1 = t1;
            a2 = t2;
            kstuck = kb | km;
            kpure = _mm512_cmpeq_epi64_mask(a0, z0)
                & _mm512_cmpeq_epi64_mask(a1, z1)
                & _mm512_cmpeq_epi64_mask(a2, z2);
            kimp = _mm512_cmpeq_epi64_mask(a0, m0)
                & _mm512_cmpeq_epi64_mask(a1, m1)
                & _mm512_cmpeq_epi64_mask(a2, m2);
            let or12 = _mm512_or_si512(a1, a2);
            krat = _mm512_testn_epi64_mask(or12, or12) & _mm512_test_epi64_mask(a0, a0);
            if (kstuck | kpure | kimp | krat) != 0 {
                break;
            }
        }
        let st = |r: &mut [i64; 8], v: __m512i| _mm512_storeu_si512(r.as_mut_ptr() as *mut _, v);
        st(&mut buf[0], a0);
        st(&mut buf[1], a1);
        st(&mut buf[2], a2);
        let mut evmask = 0u32;
        let mut evs = [Ev::Run; 8];
        for i in 0..8 {
            let w = &mut ws[i];
            w.s = [buf[0][i], buf[1][i], buf[2][i]];
            w.steps += ran;
            let bit = 1u8 << i;
            if kstuck & bit != 0 {
                // roll back: t0 = a0 + q if the digit guess was 1
                let t0 = w.s[0] + if kd & bit != 0 { q } else { 0 };
                w.s = [w.s[1] - t0, w.s[2], t0];
                w.steps -= 1;
                evmask |= 1 << i;
                evs[i] = Ev::Stuck;
            } else if kpure & bit != 0 {
                evmask |= 1 << i;
                evs[i] = Ev::Pure;
            } else if kimp & bit != 0 {
                evmask |= 1 << i;
                evs[i] = Ev::Impure;
            } else if krat & bit != 0 {
                evmask |= 1 << i;
                evs[i] = Ev::Rational(w.s[0]);
            }
            if w.steps == w.next_mark {
                w.marker = w.s;
                w.next_mark = w.next_mark.wrapping_mul(2);
            }
        }
        (evmask, evs)
    }
}

/// Per-denominator walk context: the exact engine plus the verdicts found so
/// far, indexed by numerator. Sweeps reuse it so no orbit is walked twice.
pub struct DenomCtx<'a> {
    q: i64,
    engine: OrbitEngine<'a>,
    seen: Vec<Option<FracStatus>>,
    /// Walks actually performed (kernel-dependent: fast lanes may duplicate
    /// a cycle that a sequential walker would have skipped).
    pub walks: u64,
}

impl<'a> DenomCtx<'a> {
    pub fn new(base: &'a BetaBase, q: i64) -> Result<DenomCtx<'a>> {
        Ok(DenomCtx {
            q,
            engine: OrbitEngine::new(base, q)?,
            seen: vec![None; (q + 1) as usize],
            walks: 0,
        })
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn status(&self, p: i64) -> Option<FracStatus> {
        self.seen[p as usize]
    }

    /// Decide every candidate numerator, reusing verdicts already recorded.
    /// Returns the statuses in input order.
    pub fn sweep(
        &mut self,
        kind: KernelKind,
        consts: Option<&FixedConstants>,
        ps: &[i64],
        budget: u64,
    ) -> Result<Vec<(i64, FracStatus)>> {
        // values at or above 1 can reach the invisible zero state; the lanes
        // only watch for nonzero rationals, so route them through the engine
        let (fast_ps, slow_ps): (Vec<i64>, Vec<i64>) = ps.iter().partition(|&&p| p < self.q);
        self.sweep_engine(&slow_ps, budget)?;
        match kind {
            KernelKind::Engine => self.sweep_engine(&fast_ps, budget)?,
            _ if self.q > FAST_Q_LIMIT => self.sweep_engine(&fast_ps, budget)?,
            KernelKind::Scalar => {
                let c = *consts.expect("fast kernel requires fixed-point constants");
                self.sweep_fast::<4>(&fast_ps, budget, &mut |ws, q, bound, block| {
                    run4(ws, c, q, bound, block)
                })?;
            }
            KernelKind::Avx512 => {
                #[cfg(target_arch = "x86_64")]
                {
                    let c = *consts.expect("fast kernel requires fixed-point constants");
                    // safety: kernel_for only returns Avx512 after runtime detection
                    self.sweep_fast::<8>(&fast_ps, budget, &mut |ws, q, bound, block| unsafe {
                        simd::run8(ws, c, q, bound, block)
                    })?;
                }
                #[cfg(not(target_arch = "x86_64"))]
                {
                    let _ = consts;
                    self.sweep_engine(&fast_ps, budget)?;
                }
            }
        }
        Ok(ps
            .iter()
            .map(|&p| (p, self.seen[p as usize].expect("candidate decided")))
            .collect())
    }

    fn record_outcome(&mut self, o: &WalkOutcome) {
        for &(idx, r) in &o.rationals {
            let status = if o.period == 0 {
                FracStatus::Finite {
                    digits: o.preperiod - idx,
                }
            } else if idx < o.preperiod {
                FracStatus::Impure {
                    preperiod: o.preperiod - idx,
                    period: o.period,
                }
            } else {
                FracStatus::Pure { period: o.period }
            };
            self.seen[r as usize] = Some(status);
        }
    }

    fn sweep_engine(&mut self, ps: &[i64], budget: u64) -> Result<()> {
        for &p in ps {
            if self.seen[p as usize].is_some() {
                continue;
            }
            self.walks += 1;
            match engine_walk(&self.engine, p, budget) {
                Ok(o) => self.record_outcome(&o),
                Err(Error::BudgetExhausted { .. }) => {
                    self.seen[p as usize] = Some(FracStatus::Undecided);
                }
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    fn sweep_fast<const N: usize>(
        &mut self,
        ps: &[i64],
        budget: u64,
        runner: &mut dyn FnMut(&mut [Walk; N], i64, i64, u64) -> (u32, [Ev; N]),
    ) -> Result<()> {
        let q = self.q;
        let bound = 8 * q;
        let mut pending: Vec<i64> = ps.to_vec();
        pending.reverse(); // pop() yields candidates in ascending order
        let mut lanes: [Walk; N] = std::array::from_fn(|_| Walk::parked());

        fn refill<const N: usize>(
            lanes: &mut [Walk; N],
            pending: &mut Vec<i64>,
            seen: &[Option<FracStatus>],
            walks: &mut u64,
            i: usize,
        ) {
            while let Some(p) = pending.pop() {
                if seen[p as usize].is_none() {
                    lanes[i] = Walk::new(p);
                    *walks += 1;
                    return;
                }
            }
            lanes[i] = Walk::parked();
        }
        for i in 0..N {
            refill(&mut lanes, &mut pending, &self.seen, &mut self.walks, i);
        }

        loop {
            // budget pass, then the block cap for the surviving lanes
            let mut any_live = false;
            let mut block = BLOCK;
            for i in 0..N {
                if lanes[i].live && lanes[i].steps >= budget {
                    self.seen[lanes[i].start as usize] = Some(FracStatus::Undecided);
                    refill(&mut lanes, &mut pending, &self.seen, &mut self.walks, i);
                }
                if lanes[i].live {
                    any_live = true;
                    block = block.min(budget - lanes[i].steps);
                }
            }
            if !any_live {
                return Ok(());
            }
            let (mut evmask, mut evs) = runner(&mut lanes, q, bound, block);
            // resolve stuck lanes first: their step re-runs exactly
            for lane in 0..N {
                if evs[lane] == Ev::Stuck {
                    let w = &mut lanes[lane];
                    let (next, _) = self.engine.step(OrbitState(w.s))?;
                    w.s = next.0;
                    w.steps += 1;
                    let ev = event_of(w.s, w.s0, w.marker);
                    if w.steps == w.next_mark {
                        w.marker = w.s;
                        w.next_mark = w.next_mark.wrapping_mul(2);
                    }
                    evs[lane] = ev;
                    if ev == Ev::Run {
                        evmask &= !(1 << lane);
                    }
                }
            }
            for lane in 0..N {
                if evmask & (1 << lane) == 0 || !lanes[lane].live {
                    continue;
                }
                match evs[lane] {
                    Ev::Pure => {
                        // the whole walk is one cycle; every rational on it is pure
                        let period = lanes[lane].steps;
                        let rats = std::mem::take(&mut lanes[lane].rats);
                        for (_, r) in rats {
                            self.seen[r as usize] = Some(FracStatus::Pure { period });
                        }
                        refill(&mut lanes, &mut pending, &self.seen, &mut self.walks, lane);
                    }
                    Ev::Impure => {
                        // a cycle that excludes the start: re-walk exactly for the shape
                        let start = lanes[lane].start;
                        match engine_walk(&self.engine, start, budget) {
                            Ok(o) => self.record_outcome(&o),
                            Err(Error::BudgetExhausted { .. }) => {
                                self.seen[start as usize] = Some(FracStatus::Undecided);
                            }
                            Err(e) => return Err(e),
                        }
                        refill(&mut lanes, &mut pending, &self.seen, &mut self.walks, lane);
                    }
                    Ev::Rational(r) => {
                        let k = lanes[lane].steps;
                        match self.seen[r as usize] {
                            Some(FracStatus::Impure { preperiod, period }) => {
                                // leading into a known-impure state settles the walk
                                let rats = std::mem::take(&mut lanes[lane].rats);
                                for (idx, s) in rats {
                                    self.seen[s as usize] = Some(FracStatus::Impure {
                                        preperiod: preperiod + (k - idx),
                                        period,
                                    });
                                }
                                refill(&mut lanes, &mut pending, &self.seen, &mut self.walks, lane);
                            }
                            Some(FracStatus::Finite { digits }) => {
                                let rats = std::mem::take(&mut lanes[lane].rats);
                                for (idx, s) in rats {
                                    self.seen[s as usize] = Some(FracStatus::Finite {
                                        digits: digits + (k - idx),
                                    });
                                }
                                refill(&mut lanes, &mut pending, &self.seen, &mut self.walks, lane);
                            }
                            _ => lanes[lane].rats.push((k, r)),
                        }
                    }
                    Ev::Stuck | Ev::Run => {}
                }
            }
        }
    }
}

/// One-shot sweep of a denominator: statuses for `ps` in input order.
pub fn sweep_denominator(
    base: &BetaBase,
    q: i64,
    ps: &[i64],
    budget: u64,
    kind: KernelKind,
    consts: Option<&FixedConstants>,
) -> Result<(Vec<(i64, FracStatus)>, u64)> {
    let mut ctx = DenomCtx::new(base, q)?;
    let statuses = ctx.sweep(kind, consts, ps, budget)?;
    Ok((statuses, ctx.walks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::is_purely_periodic;
    use crate::field::MinimalPolynomial;
    use crate::gamma::farey::{numerators_in, RatBound};
    use proptest::prelude::*;

    fn base(coeffs: &[i64]) -> BetaBase {
        BetaBase::new(MinimalPolynomial::new(coeffs.to_vec()).unwrap()).unwrap()
    }

    fn eta() -> BetaBase {
        base(&[-1, -1, 0, 1])
    }

    fn unit_range() -> (RatBound, RatBound) {
        (
            RatBound::new(0, 1, false).unwrap(),
            RatBound::new(1, 1, false).unwrap(),
        )
    }

    #[test]
    fn fixed_point_constants_are_certified_floors() {
        let b = eta();
        let c = FixedConstants::for_base(&b).unwrap();
        assert_eq!(c.b1, 1_456_542_797_514);
        assert_eq!(c.b2, 1_929_508_399_362);
        let beta = b.beta_f64().mid();
        assert!((c.b1 as f64 / 2f64.powi(40) - beta).abs() < 1e-10);
        assert!((c.b2 as f64 / 2f64.powi(40) - beta * beta).abs() < 1e-10);
        // no fast constants for other bases
        assert!(FixedConstants::for_base(&base(&[-1, -1, 1])).is_none());
        assert!(FixedConstants::for_base(&base(&[-1, 2, -3, 1])).is_none());
    }

    #[test]
    fn engine_walk_agrees_with_direct_checks() {
        let b = eta();
        let engine = OrbitEngine::new(&b, 5).unwrap();
        let o = engine_walk(&engine, 2, 100_000).unwrap();
        assert!(o.is_pure());
        assert_eq!(o.rationals[0], (0, 2));
        for &(_, r) in &o.rationals {
            let x = b.from_ratio(r, 5);
            assert!(is_purely_periodic(&b, &x, 100_000).unwrap());
        }
        // 0 is pure with period 1
        let z = engine_walk(&engine, 0, 10).unwrap();
        assert!(z.is_pure());
    }

    fn sweep_all(b: &BetaBase, q: i64, kind: KernelKind) -> Vec<(i64, FracStatus)> {
        let (lo, hi) = unit_range();
        let ps = numerators_in(q, &lo, &hi);
        let consts = FixedConstants::for_base(b);
        sweep_denominator(b, q, &ps, 50_000_000, kind, consts.as_ref())
            .unwrap()
            .0
    }

    #[test]
    fn scalar_lanes_agree_with_engine() {
        let b = eta();
        for q in [2i64, 3, 7, 25, 61, 97] {
            let fast = sweep_all(&b, q, KernelKind::Scalar);
            let slow = sweep_all(&b, q, KernelKind::Engine);
            assert_eq!(fast, slow, "q={q}");
        }
    }

    #[test]
    fn avx512_lanes_agree_with_engine_when_available() {
        if !is_x86_feature_detected!("avx512dq") {
            return;
        }
        let b = eta();
        for q in [2i64, 13, 49, 88, 131] {
            let fast = sweep_all(&b, q, KernelKind::Avx512);
            let slow = sweep_all(&b, q, KernelKind::Engine);
            assert_eq!(fast, slow, "q={q}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]
        #[test]
        fn fast_kernels_agree_with_engine_on_random_denominators(q in 2i64..120) {
            let b = eta();
            let fast = sweep_all(&b, q, KernelKind::Scalar);
            let slow = sweep_all(&b, q, KernelKind::Engine);
            prop_assert_eq!(fast, slow);
        }
    }

    #[test]
    fn statuses_match_the_expansion_api() {
        let b = eta();
        let q = 31;
        for (p, st) in sweep_all(&b, q, KernelKind::Scalar) {
            let x = b.from_ratio(p, q);
            let pure = is_purely_periodic(&b, &x, 1_000_000).unwrap();
            assert_eq!(st.is_pure(), pure, "p={p}/{q}");
        }
    }

    #[test]
    fn tiny_budgets_leave_fractions_undecided() {
        let b = eta();
        let ps = vec![977i64];
        let consts = FixedConstants::for_base(&b);
        for kind in [KernelKind::Scalar, KernelKind::Engine] {
            let (st, _) = sweep_denominator(&b, 1009, &ps, 5, kind, consts.as_ref()).unwrap();
            assert_eq!(st, vec![(977, FracStatus::Undecided)], "{kind:?}");
        }
    }

    #[test]
    fn kernel_choice_respects_base_and_override() {
        let (k, c) = kernel_for(&eta(), false);
        assert!(k != KernelKind::Engine && c.is_some());
        let (k, c) = kernel_for(&eta(), true);
        assert!(k == KernelKind::Engine && c.is_none());
        let (k, _) = kernel_for(&base(&[-1, -1, 1]), false);
        assert_eq!(k, KernelKind::Engine);
    }

    #[test]
    fn finite_orbits_are_reported_for_non_unit_bases() {
        // beta = 1 + sqrt(3): x^2 - 2x - 2, not a unit; 1/2 has a finite expansion
        let b = base(&[-2, -2, 1]);
        let engine = OrbitEngine::new(&b, 2).unwrap();
        let o = engine_walk(&engine, 1, 10_000).unwrap();
        assert_eq!(o.period, 0);
        assert!(o.preperiod > 0);
        assert!(!o.is_pure());
    }
}
