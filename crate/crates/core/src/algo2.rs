//! Search with stack-like lie deletion: a run of opposing answers below a node exposes it,
//! the pointer jumps back above it, and a leaf is accepted only after `k+1` equality answers.

use std::collections::HashMap;

use serde::Serialize;

use crate::adversary::AnswerSource;
use crate::error::{Error, Result};
pub use crate::numerics::max_depth_bound;
use crate::numerics::{Radii, RadiusKind};
use crate::placement::{ComparisonQuery, NodePath, Placement};
use crate::protocol::{
    drive_search, AskKind, Event, JumpReason, Poll, Protocol, SearchProtocol, SearchQuestion, TranscriptRecord,
};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Phase {
    Main,
    Verify { label: usize, suspicious: Option<usize>, eq: u32, ne: u32, first_ok: Option<bool> },
    Done(usize),
}

/// How a jump-back is accounted for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpClass {
    LieDeleting,
    VerifyLie,
    Problematic,
    Unclassified,
}

#[derive(Clone, Debug, Serialize)]
pub struct JumpRecord {
    pub atop: String,
    pub atop_depth: usize,
    pub reason: JumpReason,
    pub class: JumpClass,
}

/// Audit totals of a run so far, by category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AuditCounts {
    pub questions: u64,
    pub lies: u32,
    pub pairs: u32,
    /// Most jump-backs atop any single node.
    pub max_jumps_atop: u32,
    pub unclassified: u32,
    pub question_bound: u64,
    pub max_depth: usize,
    pub depth_bound: u64,
}

#[derive(Clone, Debug)]
struct Audit {
    x: usize,
    truth: NodePath,
    nominal: Radii,
    // lie flag of the answer that created each node of `current`
    lies: Vec<bool>,
    verify_lie: bool,
    jumps_atop: HashMap<NodePath, u32>,
    log: Vec<JumpRecord>,
    violations: Vec<String>,
    questions: u64,
    lies_told: u32,
    max_depth: usize,
    leaf_depth: usize,
    depth_bound: u64,
    problematic: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Algo2 {
    k: u32,
    radii: Radii,
    current: NodePath,
    counts: HashMap<NodePath, u32>,
    phase: Phase,
    pending: Option<ComparisonQuery>,
    pairs: u32,
    jump_backs: u32,
    event: Option<Event>,
    audit: Option<Box<Audit>>,
}

/// Radii covering every depth the pointer can reach for `mu` in a valid run.
pub fn default_radii(placement: &Placement, k: u32) -> Radii {
    let deepest = placement.mu().probs().iter().map(|p| max_depth_bound(p, k)).max().unwrap_or(0);
    Radii::new(RadiusKind::Stack, k, deepest + 2)
}

/// Depth of the suspicious node for `current`: the deepest node whose direction opposes
/// `current`'s, unless that node was given as an answer at least `k+1` times.
pub fn set_suspicious(current: &NodePath, counts: &HashMap<NodePath, u32>, k: u32) -> Option<usize> {
    let dir = current.last()?;
    let depth = (1..current.len()).rev().find(|&d| current.bit(d - 1) != dir)?;
    let verified = counts.get(&current.prefix(depth)).is_some_and(|&c| c > k);
    (!verified).then_some(depth)
}

impl Algo2 {
    pub fn new(env: &mut Placement, k: u32, radii: Radii) -> Result<Self> {
        let mut a = Algo2 {
            k,
            radii,
            current: NodePath::root(),
            counts: HashMap::new(),
            phase: Phase::Main,
            pending: None,
            pairs: 0,
            jump_backs: 0,
            event: None,
            audit: None,
        };
        // a single element is a leaf at the root and goes straight to verification
        if let Some(label) = env.leaf_element(&a.current)? {
            a.phase = Phase::Verify { label, suspicious: None, eq: 0, ne: 0, first_ok: None };
        }
        Ok(a)
    }

    /// Classifies every jump-back and checks the per-node jump-back limit, for hidden `x`.
    pub fn with_audit(mut self, env: &mut Placement, x: usize) -> Result<Self> {
        let (truth, leaf_depth) = env.finite_leaf(x)?;
        let nominal = default_radii(env, self.k);
        let problematic = problematic_depths(env, x, &nominal)?;
        self.audit = Some(Box::new(Audit {
            x,
            truth,
            nominal,
            lies: Vec::new(),
            verify_lie: false,
            jumps_atop: HashMap::new(),
            log: Vec::new(),
            violations: Vec::new(),
            questions: 0,
            lies_told: 0,
            max_depth: 0,
            leaf_depth,
            depth_bound: max_depth_bound(env.mu().prob(x), self.k),
            problematic,
        }));
        Ok(self)
    }

    pub fn current(&self) -> &NodePath {
        &self.current
    }

    /// Equality questions asked so far (each is two comparisons).
    pub fn verification_pairs(&self) -> u32 {
        self.pairs
    }

    pub fn jump_backs(&self) -> u32 {
        self.jump_backs
    }

    pub fn jump_log(&self) -> &[JumpRecord] {
        self.audit.as_ref().map_or(&[], |a| &a.log)
    }

    /// Accounting bound for the run so far; zero without an audit.
    pub fn question_bound(&self) -> u64 {
        self.audit.as_ref().map_or(0, |a| {
            question_bound(self.pairs, a.leaf_depth, a.lies_told, a.max_depth, &a.problematic, self.k, &a.nominal)
        })
    }

    pub fn audit_counts(&self) -> Option<AuditCounts> {
        let a = self.audit.as_ref()?;
        Some(AuditCounts {
            questions: a.questions,
            lies: a.lies_told,
            pairs: self.pairs,
            max_jumps_atop: a.jumps_atop.values().copied().max().unwrap_or(0),
            unclassified: a.log.iter().filter(|j| j.class == JumpClass::Unclassified).count() as u32,
            question_bound: self.question_bound(),
            max_depth: a.max_depth,
            depth_bound: a.depth_bound,
        })
    }

    /// Every audit failure: unclassified or excess jump-backs, and, once finished, a wrong
    /// output, too many equality questions, a blown accounting bound or depth bound.
    pub fn violations(&self) -> Vec<String> {
        let Some(a) = &self.audit else { return Vec::new() };
        let mut v = a.violations.clone();
        if let Phase::Done(label) = self.phase {
            if label != a.x {
                v.push(format!("output x{} but hidden element is x{}", label + 1, a.x + 1));
            }
        }
        if self.pairs > 3 * self.k + 1 {
            v.push(format!("{} equality questions exceed 3k+1", self.pairs));
        }
        let bound = self.question_bound();
        if a.questions > bound {
            v.push(format!("{} questions exceed the accounting bound {bound}", a.questions));
        }
        if a.max_depth as u64 > a.depth_bound {
            v.push(format!("pointer reached depth {} beyond the bound {}", a.max_depth, a.depth_bound));
        }
        v
    }

    fn note_answer(&mut self, yes: bool) -> bool {
        let Some((audit, q)) = self.audit.as_mut().zip(self.pending) else { return false };
        let lie = yes != q.truth(audit.x);
        audit.questions += 1;
        audit.lies_told += lie as u32;
        lie
    }

    fn is_problematic(audit: &Audit, node: &NodePath) -> bool {
        node.is_prefix_of(&audit.truth) && audit.problematic.contains(&node.len())
    }

    /// Moves `current` to the parent of the node at depth `atop`.
    fn jump_back(&mut self, atop: usize, reason: JumpReason, label: Option<usize>) {
        let atop_node = self.current.prefix(atop);
        self.current.truncate(atop - 1);
        self.jump_backs += 1;
        self.event = Some(Event::JumpBack { atop_depth: atop, reason });
        if let Some(mut audit) = self.audit.take() {
            let deletes_lie = audit.lies[atop - 1..].iter().any(|&l| l);
            audit.lies.truncate(atop - 1);
            let class = if deletes_lie {
                JumpClass::LieDeleting
            } else if reason == JumpReason::VerifyFail && label == Some(audit.x) && audit.verify_lie {
                JumpClass::VerifyLie
            } else if reason == JumpReason::Radius && Self::is_problematic(&audit, &atop_node) {
                JumpClass::Problematic
            } else {
                JumpClass::Unclassified
            };
            if class == JumpClass::Unclassified {
                audit.violations.push(format!("unclassifiable {reason:?} jump-back atop {atop_node}"));
            }
            let n = audit.jumps_atop.entry(atop_node.clone()).or_default();
            *n += 1;
            if *n > self.k {
                audit.violations.push(format!("{n} jump-backs atop {atop_node} exceed k = {}", self.k));
            }
            audit.log.push(JumpRecord { atop: atop_node.to_string(), atop_depth: atop, reason, class });
            self.audit = Some(audit);
        }
    }

    fn on_main_answer(&mut self, env: &mut Placement, yes: bool) -> Result<()> {
        let lie = self.note_answer(yes);
        self.current.push(!yes);
        if let Some(audit) = self.audit.as_mut() {
            audit.lies.push(lie);
            audit.max_depth = audit.max_depth.max(self.current.len());
        }
        *self.counts.entry(self.current.clone()).or_default() += 1;
        let suspicious = set_suspicious(&self.current, &self.counts, self.k);
        if let Some(label) = env.leaf_element(&self.current)? {
            self.phase = Phase::Verify { label, suspicious, eq: 0, ne: 0, first_ok: None };
            if let Some(audit) = self.audit.as_mut() {
                audit.verify_lie = false;
            }
        } else if let Some(s) = suspicious {
            if self.current.len() as u64 == s as u64 + self.radii.get(s as u64) {
                self.jump_back(s, JumpReason::Radius, None);
            }
        }
        Ok(())
    }

    fn on_verify_answer(&mut self, yes: bool) {
        let Phase::Verify { label, suspicious, mut eq, mut ne, first_ok } = self.phase.clone() else {
            unreachable!()
        };
        let lie = self.note_answer(yes);
        if let Some(audit) = self.audit.as_mut() {
            audit.verify_lie |= lie;
        }
        let Some(first_ok) = first_ok else {
            // "x < label?" should be answered no
            self.phase = Phase::Verify { label, suspicious, eq, ne, first_ok: Some(!yes) };
            return;
        };
        self.pairs += 1;
        if first_ok && yes {
            eq += 1;
        } else {
            ne += 1;
        }
        if eq == self.k + 1 {
            self.event = Some(Event::Verify { label, result: true, eq_questions: eq + ne });
            self.phase = Phase::Done(label);
        } else if ne > eq {
            self.event = Some(Event::Verify { label, result: false, eq_questions: eq + ne });
            self.phase = Phase::Main;
            match suspicious {
                Some(s) => self.jump_back(s, JumpReason::VerifyFail, Some(label)),
                None if !self.current.is_root() => {
                    let depth = self.current.len();
                    self.jump_back(depth, JumpReason::VerifyFail, Some(label));
                }
                // a lone element has nowhere to jump; verify again
                None => self.phase = Phase::Verify { label, suspicious, eq: 0, ne: 0, first_ok: None },
            }
        } else {
            self.phase = Phase::Verify { label, suspicious, eq, ne, first_ok: None };
        }
    }
}

impl Protocol for Algo2 {
    type Env = Placement;
    type Question = SearchQuestion;
    type Output = usize;
    type Key = ();

    fn poll(&mut self, env: &mut Placement) -> Result<Poll<SearchQuestion, usize>> {
        let question = match &self.phase {
            Phase::Done(label) => return Ok(Poll::Done(*label)),
            Phase::Main => SearchQuestion { query: env.to_comparison(&self.current)?, kind: AskKind::Main },
            Phase::Verify { label, first_ok: None, .. } => SearchQuestion {
                query: ComparisonQuery { boundary_index: label + 1 },
                kind: AskKind::VerifyBelow,
            },
            Phase::Verify { label, .. } => SearchQuestion {
                query: ComparisonQuery { boundary_index: label + 2 },
                kind: AskKind::VerifyAbove,
            },
        };
        self.pending = Some(question.query);
        Ok(Poll::Ask(question))
    }

    fn feed(&mut self, env: &mut Placement, yes: bool) -> Result<()> {
        match self.phase {
            Phase::Done(_) => Err(Error::Precondition("answer fed to a finished search".into())),
            Phase::Main => self.on_main_answer(env, yes),
            Phase::Verify { .. } => {
                self.on_verify_answer(yes);
                Ok(())
            }
        }
    }
}

impl SearchProtocol for Algo2 {
    fn depth_current(&self) -> usize {
        self.current.len()
    }

    fn take_event(&mut self) -> Option<Event> {
        self.event.take()
    }
}

/// Asks "= label?" pairs until `k+1` read "=" (true) or "≠" outnumbers "=" (false).
/// Returns the verdict and the number of pairs asked.
pub fn verify_object(label: usize, x: usize, k: u32, answers: &mut dyn AnswerSource) -> (bool, u32) {
    let below = ComparisonQuery { boundary_index: label + 1 };
    let above = ComparisonQuery { boundary_index: label + 2 };
    let (mut eq, mut ne) = (0, 0);
    loop {
        let first = answers.answer(below.truth(x));
        let second = answers.answer(above.truth(x));
        if !first && second {
            eq += 1;
        } else {
            ne += 1;
        }
        if eq == k + 1 {
            return (true, eq + ne);
        }
        if ne > eq {
            return (false, eq + ne);
        }
    }
}

/// `2V + D + K'(r'(M)+1) + k * sum over problematic v of (r'(depth v)+1)`.
pub fn question_bound(pairs: u32, depth: usize, lies: u32, max_depth: usize, problematic: &[usize], k: u32, radii: &Radii) -> u64 {
    let r = |d: usize| radii.get(d.max(1) as u64) + 1;
    2 * pairs as u64
        + depth as u64
        + lies as u64 * r(max_depth)
        + k as u64 * problematic.iter().map(|&d| r(d)).sum::<u64>()
}

/// Depths of the nodes on the path to `x`'s leaf whose next `r'(d)` path nodes all oppose them.
pub fn problematic_depths(env: &mut Placement, x: usize, radii: &Radii) -> Result<Vec<usize>> {
    let (truth, depth) = env.finite_leaf(x)?;
    Ok((1..=depth)
        .filter(|&d| {
            let r = radii.get(d as u64) as usize;
            depth >= d + r && (d..d + r).all(|i| truth.bit(i) != truth.bit(d - 1))
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub output_label: usize,
    pub questions: u64,
    pub lies_told: u32,
    pub leaf_depth: usize,
    pub max_depth: usize,
    pub max_depth_bound: u64,
    pub verification_pairs: u32,
    pub jump_backs: u32,
    pub jump_log: Vec<JumpRecord>,
    pub question_bound: u64,
    pub audit: AuditCounts,
    pub violations: Vec<String>,
    pub transcript: Vec<TranscriptRecord>,
}

pub use crate::algo1::RunOptions;

/// Runs the search for hidden element `x` (0-based) against `answers`, with auditing.
pub fn run_algo2(
    env: &mut Placement,
    x: usize,
    k: u32,
    answers: &mut dyn AnswerSource,
    opts: &RunOptions,
) -> Result<RunReport> {
    let radii = match opts.radius_override {
        Some(r) => Radii::constant(RadiusKind::Stack, k, r),
        None => default_radii(env, k),
    };
    let mut algo = Algo2::new(env, k, radii)?.with_audit(env, x)?;
    let run = drive_search(&mut algo, env, x, answers, opts.max_questions, opts.record)?;
    let res = run.result;
    let (_, leaf_depth) = env.finite_leaf(x)?;
    Ok(RunReport {
        output_label: res.output,
        questions: res.questions,
        lies_told: res.lies,
        leaf_depth,
        max_depth: run.max_depth,
        max_depth_bound: max_depth_bound(env.mu().prob(x), k),
        verification_pairs: algo.verification_pairs(),
        jump_backs: algo.jump_backs(),
        jump_log: algo.jump_log().to_vec(),
        question_bound: algo.question_bound(),
        audit: algo.audit_counts().expect("audited run"),
        violations: algo.violations(),
        transcript: run.transcript,
    })
}
