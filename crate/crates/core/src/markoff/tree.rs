//! Best-first traversal of the tree of Markoff triples.
//!
//! Each non-seed triangle of the Farey tessellation is reached from the seed
//! triangle by crossing one edge, and it introduces exactly one new slope.
//! A triangle whose new trace is at least as large as both edge traces is
//! *monotone*: each of its two children has new trace `y z - x > z` and is
//! monotone again, so everything below it is larger. Such a triangle can be
//! dropped as soon as its own trace is past the cutoff. Triangles that are
//! not monotone all lie below a bounded maximum trace, so there are finitely
//! many of them.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::farey::{other_companion, Slope};
use crate::geometry::{length_from_trace, trace_from_length};

use super::{FareyTriple, GeodesicRecord, SurfacePoint, MAX_LENGTH};

/// Slack on the pruning threshold so that rounding in a trace never drops a
/// length sitting exactly on the cutoff.
const PRUNE_SLACK: f64 = 1e-12;

/// A triangle reached by crossing `edge`; `vertex` is the slope it adds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Branch {
    pub edge: [(Slope, f64); 2],
    pub vertex: (Slope, f64),
    pub depth: u32,
}

impl Branch {
    pub fn is_monotone(&self) -> bool {
        self.vertex.1 >= self.edge[0].1.max(self.edge[1].1)
    }

    pub fn max_trace(&self) -> f64 {
        self.vertex.1.max(self.edge[0].1).max(self.edge[1].1)
    }

    pub fn triple(&self) -> FareyTriple {
        FareyTriple {
            slopes: [self.edge[0].0, self.edge[1].0, self.vertex.0],
            traces: [self.edge[0].1, self.edge[1].1, self.vertex.1],
        }
    }

    /// The triangle across the edge `(keep, vertex)`; `drop` is the edge
    /// endpoint that is flipped away.
    fn cross(&self, keep: (Slope, f64), drop: (Slope, f64)) -> Result<Branch> {
        let slope = other_companion(&keep.0, &self.vertex.0, &drop.0)?;
        let trace = keep.1 * self.vertex.1 - drop.1;
        if !trace.is_finite() {
            return Err(Error::Overflow {
                depth: self.depth + 1,
                detail: format!("trace of {slope} is not finite"),
            });
        }
        Ok(Branch {
            edge: [keep, self.vertex],
            vertex: (slope, trace),
            depth: self.depth + 1,
        })
    }

    pub fn children(&self) -> Result<[Branch; 2]> {
        Ok([
            self.cross(self.edge[0], self.edge[1])?,
            self.cross(self.edge[1], self.edge[0])?,
        ])
    }
}

pub(crate) fn root_branches(pt: &SurfacePoint) -> Result<[Branch; 3]> {
    let t = pt.seed();
    let mk = |i: usize| -> Result<Branch> {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let slope = other_companion(&t.slopes[j], &t.slopes[k], &t.slopes[i])?;
        Ok(Branch {
            edge: [(t.slopes[j], t.traces[j]), (t.slopes[k], t.traces[k])],
            vertex: (slope, t.traces[j] * t.traces[k] - t.traces[i]),
            depth: 1,
        })
    };
    Ok([mk(0)?, mk(1)?, mk(2)?])
}

struct Queued {
    key: f64,
    seq: u64,
    branch: Branch,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    // Reversed: BinaryHeap is a max-heap and we want the smallest key first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Iterator over the triangles of the tree, smallest maximal trace first,
/// skipping monotone triangles whose new trace is at least `prune_trace`.
pub struct BranchWalk {
    heap: BinaryHeap<Queued>,
    prune_trace: f64,
    seq: u64,
    failed: bool,
}

impl BranchWalk {
    pub fn new(pt: &SurfacePoint, prune_trace: f64) -> Result<BranchWalk> {
        BranchWalk::from_roots(root_branches(pt)?, prune_trace)
    }

    pub fn from_roots(
        roots: impl IntoIterator<Item = Branch>,
        prune_trace: f64,
    ) -> Result<BranchWalk> {
        let mut walk = BranchWalk {
            heap: BinaryHeap::new(),
            prune_trace,
            seq: 0,
            failed: false,
        };
        for b in roots {
            walk.offer(b);
        }
        Ok(walk)
    }

    fn pruned(&self, b: &Branch) -> bool {
        b.is_monotone() && b.vertex.1 >= self.prune_trace * (1.0 + PRUNE_SLACK)
    }

    fn offer(&mut self, b: Branch) {
        if !self.pruned(&b) {
            self.heap.push(Queued {
                key: b.max_trace(),
                seq: self.seq,
                branch: b,
            });
            self.seq += 1;
        }
    }
}

impl Iterator for BranchWalk {
    type Item = Result<Branch>;

    fn next(&mut self) -> Option<Result<Branch>> {
        if self.failed {
            return None;
        }
        let Queued { branch, .. } = self.heap.pop()?;
        match branch.children() {
            Ok([c0, c1]) => {
                self.offer(c0);
                self.offer(c1);
                Some(Ok(branch))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

fn check_cutoff(cutoff: f64) -> Result<f64> {
    if !(cutoff > 0.0) {
        return Err(domain(format!(
            "length cutoff must be positive, got {cutoff}"
        )));
    }
    if cutoff > MAX_LENGTH {
        return Err(Error::Overflow {
            depth: 0,
            detail: format!("cutoff {cutoff} exceeds the supported maximum length {MAX_LENGTH}"),
        });
    }
    trace_from_length(cutoff)
}

/// Stream of simple closed geodesics of length `< cutoff`, each exactly
/// once, in approximately increasing length.
pub struct GeodesicStream {
    seeds: VecDeque<GeodesicRecord>,
    walk: BranchWalk,
    cutoff: f64,
    seen: HashSet<Slope>,
}

impl GeodesicStream {
    pub fn new(pt: &SurfacePoint, cutoff: f64) -> Result<GeodesicStream> {
        let prune = check_cutoff(cutoff)?;
        let t = pt.seed();
        let mut seeds = VecDeque::new();
        for i in 0..3 {
            let rec = GeodesicRecord::from_trace(t.slopes[i], t.traces[i])?;
            if rec.length < cutoff {
                seeds.push_back(rec);
            }
        }
        Ok(GeodesicStream {
            seeds,
            walk: BranchWalk::new(pt, prune)?,
            cutoff,
            seen: HashSet::new(),
        })
    }

    fn from_subtree(root: Branch, cutoff: f64) -> Result<GeodesicStream> {
        let prune = check_cutoff(cutoff)?;
        Ok(GeodesicStream {
            seeds: VecDeque::new(),
            walk: BranchWalk::from_roots([root], prune)?,
            cutoff,
            seen: HashSet::new(),
        })
    }
}

impl Iterator for GeodesicStream {
    type Item = Result<GeodesicRecord>;

    fn next(&mut self) -> Option<Result<GeodesicRecord>> {
        if let Some(rec) = self.seeds.pop_front() {
            self.seen.insert(rec.slope);
            return Some(Ok(rec));
        }
        loop {
            let branch = match self.walk.next()? {
                Ok(b) => b,
                Err(e) => return Some(Err(e)),
            };
            let (slope, trace) = branch.vertex;
            // Non-monotone triangles can carry traces in (0, 2] only if the
            // point is invalid; length_from_trace reports that.
            let rec = match GeodesicRecord::from_trace(slope, trace) {
                Ok(r) => r,
                Err(e) => return Some(Err(e)),
            };
            if rec.length < self.cutoff && self.seen.insert(slope) {
                return Some(Ok(rec));
            }
        }
    }
}

fn sort_records(records: &mut [GeodesicRecord]) {
    records.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then_with(|| a.slope.cmp(&b.slope))
    });
}

/// All simple closed geodesics with length `< cutoff`, sorted by length
/// (ties broken by slope).
pub fn enumerate_geodesics(pt: &SurfacePoint, cutoff: f64) -> Result<Vec<GeodesicRecord>> {
    let mut out = GeodesicStream::new(pt, cutoff)?.collect::<Result<Vec<_>>>()?;
    sort_records(&mut out);
    Ok(out)
}

/// Same set as [`enumerate_geodesics`], with disjoint subtrees of the
/// frontier processed on `threads` workers. The output is identical for
/// every thread count.
pub fn enumerate_geodesics_parallel(
    pt: &SurfacePoint,
    cutoff: f64,
    threads: usize,
) -> Result<Vec<GeodesicRecord>> {
    if threads <= 1 {
        return enumerate_geodesics(pt, cutoff);
    }
    let prune = check_cutoff(cutoff)?;
    let mut prefix: Vec<GeodesicRecord> =
        GeodesicStream::new(pt, cutoff)?.seeds.into_iter().collect();

    // Breadth-first expansion until there is enough independent work.
    let keep = |b: &Branch| !(b.is_monotone() && b.vertex.1 >= prune * (1.0 + PRUNE_SLACK));
    let mut frontier: VecDeque<Branch> = root_branches(pt)?.into_iter().filter(keep).collect();
    let target = 8 * threads;
    while frontier.len() < target {
        let Some(b) = frontier.pop_front() else { break };
        let rec = GeodesicRecord::from_trace(b.vertex.0, b.vertex.1)?;
        if rec.length < cutoff {
            prefix.push(rec);
        }
        for c in b.children()? {
            if keep(&c) {
                frontier.push_back(c);
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| domain(format!("cannot build thread pool: {e}")))?;
    let frontier: Vec<Branch> = frontier.into();
    let parts: Vec<Result<Vec<GeodesicRecord>>> = pool.install(|| {
        frontier
            .par_iter()
            .map(|root| GeodesicStream::from_subtree(*root, cutoff)?.collect())
            .collect()
    });

    // Subtrees are disjoint; only their roots can coincide with the prefix.
    let mut seen: HashSet<Slope> = prefix.iter().map(|r| r.slope).collect();
    let mut out = prefix;
    for part in parts {
        for rec in part? {
            if seen.insert(rec.slope) {
                out.push(rec);
            }
        }
    }
    sort_records(&mut out);
    Ok(out)
}

/// The shortest simple closed geodesic (ties broken by slope).
pub fn systole_record(pt: &SurfacePoint) -> Result<GeodesicRecord> {
    let min_seed = pt.traces().into_iter().fold(f64::INFINITY, f64::min);
    // Every seed is a candidate, so this cutoff contains the systole.
    let cutoff = length_from_trace(min_seed)? * (1.0 + 1e-9) + 1e-12;
    enumerate_geodesics(pt, cutoff)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Numeric("systole search returned no geodesic".into()))
}

/// Two once-meeting geodesics together with both of their common neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborPair {
    pub first: GeodesicRecord,
    pub second: GeodesicRecord,
    /// The two slopes meeting both `first` and `second` once, with traces.
    /// Their traces sum to `first.trace * second.trace`.
    pub companions: [(Slope, f64); 2],
}

impl NeighborPair {
    pub fn length_sum(&self) -> f64 {
        self.first.length + self.second.length
    }
}

fn pair(a: (Slope, f64), b: (Slope, f64), third: (Slope, f64)) -> Result<NeighborPair> {
    let other = other_companion(&a.0, &b.0, &third.0)?;
    Ok(NeighborPair {
        first: GeodesicRecord::from_trace(a.0, a.1)?,
        second: GeodesicRecord::from_trace(b.0, b.1)?,
        companions: [third, (other, a.1 * b.1 - third.1)],
    })
}

/// Every unordered pair of once-meeting simple closed geodesics with
/// `l_first + l_second < sum_cutoff`, each pair exactly once.
///
/// Pairs are the edges of the Farey tessellation: three at the seed and two
/// new ones for every other triangle.
pub fn enumerate_neighbor_pairs(pt: &SurfacePoint, sum_cutoff: f64) -> Result<Vec<NeighborPair>> {
    let sys = systole_record(pt)?.length;
    if !(sum_cutoff > 0.0) || sum_cutoff > MAX_LENGTH {
        return Err(domain(format!(
            "pair cutoff {sum_cutoff} out of range (0, {MAX_LENGTH}]"
        )));
    }
    // A vertex v only contributes edges of length sum >= l_v + sys.
    let prune = trace_from_length((sum_cutoff - sys).max(f64::MIN_POSITIVE))?;
    let t = pt.seed();
    let seed = |i: usize| (t.slopes[i], t.traces[i]);
    let mut out = Vec::new();
    for i in 0..3 {
        out.push(pair(seed((i + 1) % 3), seed((i + 2) % 3), seed(i))?);
    }
    for b in BranchWalk::new(pt, prune)? {
        let b = b?;
        out.push(pair(b.edge[0], b.vertex, b.edge[1])?);
        out.push(pair(b.edge[1], b.vertex, b.edge[0])?);
    }
    out.retain(|p| p.length_sum() < sum_cutoff);
    out.sort_by(|a, b| {
        a.length_sum()
            .total_cmp(&b.length_sum())
            .then_with(|| (a.first.slope, a.second.slope).cmp(&(b.first.slope, b.second.slope)))
    });
    Ok(out)
}
