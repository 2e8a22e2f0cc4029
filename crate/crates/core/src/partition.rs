//! Partitions of the real line into intervals with open or closed ends,
//! including singleton pieces, and their common refinement.

use std::cmp::Ordering;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exact::{AlgebraicReal, Rat};
use crate::{Error, Result};

/// An interval of ℝ. `None` endpoints are infinite (and always open).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interval {
    pub lo: Option<AlgebraicReal>,
    pub hi: Option<AlgebraicReal>,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn whole() -> Interval {
        Interval { lo: None, hi: None, lo_closed: false, hi_closed: false }
    }

    pub fn singleton(x: AlgebraicReal) -> Interval {
        Interval { lo: Some(x.clone()), hi: Some(x), lo_closed: true, hi_closed: true }
    }

    /// Closed interval `[lo, hi]` with rational ends.
    pub fn closed(lo: Rat, hi: Rat) -> Interval {
        Interval { lo: Some(lo.into()), hi: Some(hi.into()), lo_closed: true, hi_closed: true }
    }

    pub fn new(lo: Option<AlgebraicReal>, lo_closed: bool, hi: Option<AlgebraicReal>, hi_closed: bool) -> Result<Interval> {
        let iv = Interval { lo_closed: lo_closed && lo.is_some(), hi_closed: hi_closed && hi.is_some(), lo, hi };
        if (lo_closed && iv.lo.is_none()) || (hi_closed && iv.hi.is_none()) {
            return Err(Error::EmptyInterval("infinite endpoints are open".into()));
        }
        if let (Some(a), Some(b)) = (&iv.lo, &iv.hi) {
            match a.cmp(b) {
                Ordering::Greater => return Err(Error::EmptyInterval(iv.to_string())),
                Ordering::Equal if !(iv.lo_closed && iv.hi_closed) => {
                    return Err(Error::EmptyInterval(iv.to_string()))
                }
                _ => {}
            }
        }
        Ok(iv)
    }

    pub fn is_singleton(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(a), Some(b)) if a == b)
    }

    pub fn contains(&self, x: &AlgebraicReal) -> bool {
        let above = match &self.lo {
            None => true,
            Some(a) => match x.cmp(a) {
                Ordering::Greater => true,
                Ordering::Equal => self.lo_closed,
                Ordering::Less => false,
            },
        };
        above
            && match &self.hi {
                None => true,
                Some(b) => match x.cmp(b) {
                    Ordering::Less => true,
                    Ordering::Equal => self.hi_closed,
                    Ordering::Greater => false,
                },
            }
    }

    pub fn contains_rat(&self, x: &Rat) -> bool {
        self.contains(&AlgebraicReal::from(x))
    }

    /// Whether every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lo_ok = match (&other.lo, &self.lo) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(b), Some(a)) => match a.cmp(b) {
                Ordering::Greater => true,
                Ordering::Equal => other.lo_closed || !self.lo_closed,
                Ordering::Less => false,
            },
        };
        let hi_ok = match (&other.hi, &self.hi) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(b), Some(a)) => match a.cmp(b) {
                Ordering::Less => true,
                Ordering::Equal => other.hi_closed || !self.hi_closed,
                Ordering::Greater => false,
            },
        };
        lo_ok && hi_ok
    }

    /// A point of the interval: the point itself for singletons, otherwise a
    /// rational strictly inside.
    pub fn representative(&self) -> AlgebraicReal {
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) if a == b => a.clone(),
            (Some(a), Some(b)) => AlgebraicReal::rational_between(a, b).into(),
            (Some(a), None) => (a.enclosure().1.floor() + Rat::one()).into(),
            (None, Some(b)) => (b.enclosure().0.ceil() - Rat::one()).into(),
            (None, None) => Rat::zero().into(),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        let show = |x: &Option<AlgebraicReal>, inf: &str| match x {
            None => inf.to_string(),
            Some(v) if v.is_rational() => v.to_string(),
            Some(v) => format!("{:.9}", v.to_f64()),
        };
        write!(f, "{l}{}, {}{r}", show(&self.lo, "-inf"), show(&self.hi, "inf"))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Endpoint {
    Infinite(String),
    Finite(AlgebraicReal),
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: Endpoint,
    lo_closed: bool,
    hi: Endpoint,
    hi_closed: bool,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let end = |x: &Option<AlgebraicReal>, inf: &str| match x {
            None => Endpoint::Infinite(inf.to_string()),
            Some(v) => Endpoint::Finite(v.clone()),
        };
        IntervalRepr { lo: end(&self.lo, "-inf"), lo_closed: self.lo_closed, hi: end(&self.hi, "inf"), hi_closed: self.hi_closed }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Interval, D::Error> {
        let r = IntervalRepr::deserialize(deserializer)?;
        let end = |e: Endpoint, inf: &str| -> std::result::Result<Option<AlgebraicReal>, D::Error> {
            match e {
                Endpoint::Finite(v) => Ok(Some(v)),
                Endpoint::Infinite(s) if s == inf || (inf == "inf" && s == "+inf") => Ok(None),
                // rationals written as strings arrive here too
                Endpoint::Infinite(s) => s.parse::<Rat>().map(|r| Some(r.into())).map_err(D::Error::custom),
            }
        };
        Interval::new(end(r.lo, "-inf")?, r.lo_closed, end(r.hi, "inf")?, r.hi_closed).map_err(D::Error::custom)
    }
}

/// Which neighbouring piece owns a cut point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutKind {
    /// The point closes the piece on its left: `(.., a]`, `(a, ..)`.
    Left,
    /// The point opens the piece on its right: `(.., a)`, `[a, ..)`.
    Right,
    /// The point is a piece of its own: `(.., a)`, `[a, a]`, `(a, ..)`.
    Singleton,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub at: AlgebraicReal,
    pub kind: CutKind,
}

impl Cut {
    pub fn new(at: AlgebraicReal, kind: CutKind) -> Cut {
        Cut { at, kind }
    }
}

/// A partition of ℝ into finitely many intervals, stored as its ascending
/// boundary points. Adjacent pieces are never merged implicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    cuts: Vec<Cut>,
    /// `first[j]` is the index of the open piece just before cut `j`;
    /// `first[cuts.len()]` is the last piece.
    first: Vec<usize>,
}

impl Default for Partition {
    fn default() -> Partition {
        Partition::whole()
    }
}

impl Partition {
    /// The one-piece partition `{ℝ}`.
    pub fn whole() -> Partition {
        Partition { cuts: Vec::new(), first: vec![0] }
    }

    /// Build from strictly ascending cut points.
    pub fn from_cuts(cuts: Vec<Cut>) -> Result<Partition> {
        for w in cuts.windows(2) {
            if w[0].at >= w[1].at {
                return Err(Error::InvalidPartition(format!("cut points not ascending at {}", w[1].at)));
            }
        }
        Ok(Partition::from_sorted_cuts(cuts))
    }

    pub(crate) fn from_sorted_cuts(cuts: Vec<Cut>) -> Partition {
        let mut first = Vec::with_capacity(cuts.len() + 1);
        let mut idx = 0;
        for c in &cuts {
            first.push(idx);
            idx += if c.kind == CutKind::Singleton { 2 } else { 1 };
        }
        first.push(idx);
        Partition { cuts, first }
    }

    /// Build from ascending pieces, checking that they tile ℝ.
    pub fn from_pieces(pieces: &[Interval]) -> Result<Partition> {
        let bad = |msg: String| Err(Error::InvalidPartition(msg));
        if pieces.is_empty() {
            return bad("no pieces".into());
        }
        if pieces[0].lo.is_some() {
            return bad("first piece must start at -inf".into());
        }
        if pieces.last().unwrap().hi.is_some() {
            return bad("last piece must end at +inf".into());
        }
        let mut cuts = Vec::new();
        let mut i = 0;
        while i + 1 < pieces.len() {
            let (cur, next) = (&pieces[i], &pieces[i + 1]);
            let (Some(a), Some(b)) = (&cur.hi, &next.lo) else {
                return bad(format!("gap or overlap between {cur} and {next}"));
            };
            if a != b {
                return bad(format!("gap or overlap between {cur} and {next}"));
            }
            if next.is_singleton() {
                let after = pieces.get(i + 2);
                let ok = !cur.hi_closed && after.is_some_and(|n| n.lo.as_ref() == Some(a) && !n.lo_closed);
                if !ok {
                    return bad(format!("singleton {next} must sit between open neighbours"));
                }
                cuts.push(Cut::new(a.clone(), CutKind::Singleton));
                i += 2;
                continue;
            }
            let kind = match (cur.hi_closed, next.lo_closed) {
                (true, false) => CutKind::Left,
                (false, true) => CutKind::Right,
                _ => return bad(format!("boundary {a} must belong to exactly one of {cur} and {next}")),
            };
            cuts.push(Cut::new(a.clone(), kind));
            i += 1;
        }
        for p in pieces {
            Interval::new(p.lo.clone(), p.lo_closed, p.hi.clone(), p.hi_closed)?;
        }
        Partition::from_cuts(cuts)
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    /// Number of pieces.
    pub fn len(&self) -> usize {
        self.first[self.cuts.len()] + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the open piece just before cut `j` (the last piece when
    /// `j == cuts().len()`).
    pub fn open_piece(&self, j: usize) -> usize {
        self.first[j]
    }

    /// Index of the piece holding cut point `j`.
    pub fn point_piece(&self, j: usize) -> usize {
        match self.cuts[j].kind {
            CutKind::Left => self.first[j],
            CutKind::Right => self.first[j + 1],
            CutKind::Singleton => self.first[j] + 1,
        }
    }

    pub fn pieces(&self) -> Vec<Interval> {
        let mut out = Vec::with_capacity(self.len());
        let mut lo: Option<AlgebraicReal> = None;
        let mut lo_closed = false;
        for c in &self.cuts {
            let hi_closed = c.kind == CutKind::Left;
            out.push(Interval { lo: lo.clone(), hi: Some(c.at.clone()), lo_closed, hi_closed });
            if c.kind == CutKind::Singleton {
                out.push(Interval::singleton(c.at.clone()));
            }
            lo = Some(c.at.clone());
            lo_closed = c.kind == CutKind::Right;
        }
        out.push(Interval { lo, hi: None, lo_closed, hi_closed: false });
        out
    }

    pub fn piece(&self, i: usize) -> Interval {
        // pieces are cheap to rebuild locally
        let j = self.first.partition_point(|&f| f <= i);
        // j - 1 is the last cut whose preceding open piece starts at or before i
        let j = j.saturating_sub(1);
        if self.first[j] == i {
            let lo = if j == 0 { None } else { Some(self.cuts[j - 1].at.clone()) };
            let lo_closed = j > 0 && self.cuts[j - 1].kind == CutKind::Right;
            let (hi, hi_closed) = match self.cuts.get(j) {
                Some(c) => (Some(c.at.clone()), c.kind == CutKind::Left),
                None => (None, false),
            };
            Interval { lo, hi, lo_closed, hi_closed }
        } else {
            Interval::singleton(self.cuts[j].at.clone())
        }
    }

    /// Index of the piece containing `x`.
    pub fn locate(&self, x: &AlgebraicReal) -> usize {
        let j = self.cuts.partition_point(|c| &c.at < x);
        if j < self.cuts.len() && &self.cuts[j].at == x {
            self.point_piece(j)
        } else {
            self.first[j]
        }
    }

    pub fn locate_rat(&self, x: &Rat) -> usize {
        let j = self.cuts.partition_point(|c| c.at.cmp_rat(x) == Ordering::Less);
        if j < self.cuts.len() && self.cuts[j].at.cmp_rat(x) == Ordering::Equal {
            self.point_piece(j)
        } else {
            self.first[j]
        }
    }

    /// One point per piece (rational except for singletons at irrational points).
    pub fn representatives(&self) -> Vec<AlgebraicReal> {
        self.pieces().iter().map(Interval::representative).collect()
    }

    /// The coarsest common refinement of `parts`.
    pub fn refine(parts: &[&Partition]) -> Partition {
        Partition::refine_with_maps(parts).0
    }

    /// Common refinement together with, for each input, the index of the
    /// input piece containing each output piece.
    ///
    /// At a point cut by several inputs the output keeps the shared
    /// closedness when all agree and isolates the point as a singleton
    /// otherwise, so the result has at most `Σ|A_i|` pieces.
    pub fn refine_with_maps(parts: &[&Partition]) -> (Partition, Vec<Vec<usize>>) {
        let k = parts.len();
        let mut heads = vec![0usize; k];
        let mut cuts: Vec<Cut> = Vec::new();
        let mut maps: Vec<Vec<usize>> = vec![vec![0]; k];
        let mut cur = vec![0usize; k];
        let mut group: Vec<(usize, CutKind)> = Vec::with_capacity(k);
        loop {
            // k-way merge: the smallest pending cut point across inputs
            let mut at: Option<&AlgebraicReal> = None;
            group.clear();
            for (i, p) in parts.iter().enumerate() {
                let Some(c) = p.cuts.get(heads[i]) else { continue };
                match at.map(|a| c.at.cmp(a)) {
                    None | Some(Ordering::Less) => {
                        at = Some(&c.at);
                        group.clear();
                        group.push((i, c.kind));
                    }
                    Some(Ordering::Equal) => group.push((i, c.kind)),
                    Some(Ordering::Greater) => {}
                }
            }
            let Some(at) = at else { break };
            for &(i, _) in &group {
                heads[i] += 1;
            }
            let kind0 = group[0].1;
            let kind = if group.iter().all(|x| x.1 == kind0) { kind0 } else { CutKind::Singleton };
            // piece index at the point and just after it, per input
            let mut at_idx = cur.clone();
            let mut after_idx = cur.clone();
            for &(i, kd) in &group {
                match kd {
                    CutKind::Left => {
                        after_idx[i] = cur[i] + 1;
                    }
                    CutKind::Right => {
                        at_idx[i] = cur[i] + 1;
                        after_idx[i] = cur[i] + 1;
                    }
                    CutKind::Singleton => {
                        at_idx[i] = cur[i] + 1;
                        after_idx[i] = cur[i] + 2;
                    }
                }
            }
            match kind {
                CutKind::Singleton => {
                    for i in 0..k {
                        maps[i].push(at_idx[i]);
                        maps[i].push(after_idx[i]);
                    }
                }
                CutKind::Left | CutKind::Right => {
                    for i in 0..k {
                        maps[i].push(after_idx[i]);
                    }
                }
            }
            cur = after_idx;
            cuts.push(Cut::new(at.clone(), kind));
        }
        (Partition::from_sorted_cuts(cuts), maps)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pieces: Vec<String> = self.pieces().iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", pieces.join(", "))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            pieces: Vec<Interval>,
        }
        Repr { pieces: self.pieces() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Partition, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            pieces: Vec<Interval>,
        }
        let r = Repr::deserialize(deserializer)?;
        Partition::from_pieces(&r.pieces).map_err(D::Error::custom)
    }
}
