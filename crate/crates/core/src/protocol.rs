//! Questioners as resumable state machines.
//!
//! A protocol alternates between [`Protocol::poll`], which names the next question (or the
//! output), and [`Protocol::feed`], which consumes the answer. States are cheap to clone, so
//! the exhaustive explorer can fork a run at every question. Shared, lazily refined data
//! (the placement) lives in an environment passed to every call instead of in the state.

use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::adversary::AnswerSource;
use crate::error::{Error, Result};
use crate::placement::{ComparisonQuery, Placement};

pub enum Poll<Q, O> {
    Ask(Q),
    Done(O),
}

pub trait Protocol: Clone {
    type Env;
    type Question: Clone;
    type Output: Clone;
    /// Everything that influences future behaviour; used to merge identical explorer states.
    type Key: Hash + Eq + Clone;

    fn poll(&mut self, env: &mut Self::Env) -> Result<Poll<Self::Question, Self::Output>>;

    /// Consumes the answer to the question returned by the last `poll`.
    fn feed(&mut self, env: &mut Self::Env, yes: bool) -> Result<()>;

    fn memo_key(&self) -> Option<Self::Key> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AskKind {
    Main,
    Majority,
    /// First half of an equality question: "x < label?", expected no.
    VerifyBelow,
    /// Second half: "x < successor(label)?", expected yes.
    VerifyAbove,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchQuestion {
    pub query: ComparisonQuery,
    pub kind: AskKind,
}

impl SearchQuestion {
    pub fn truth(&self, x: usize) -> bool {
        self.query.truth(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpReason {
    Radius,
    VerifyFail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    AdvanceLv,
    MajorityReset,
    JumpBack { atop_depth: usize, reason: JumpReason },
    Verify { label: usize, result: bool, eq_questions: u32 },
}

/// One answered question, as written to transcripts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub t: u64,
    pub kind: AskKind,
    pub boundary_index: usize,
    pub answer_bit: u8,
    pub lie: bool,
    pub depth_current: usize,
    pub depth_last_verified: Option<usize>,
    pub event: Option<Event>,
}

/// Extra hooks the two search algorithms expose for transcripts.
pub trait SearchProtocol: Protocol<Env = Placement, Question = SearchQuestion, Output = usize> {
    fn depth_current(&self) -> usize;
    fn depth_last_verified(&self) -> Option<usize> {
        None
    }
    fn take_event(&mut self) -> Option<Event>;
}

#[derive(Clone, Debug)]
pub struct DriveResult<O> {
    pub output: O,
    pub questions: u64,
    pub lies: u32,
}

/// Runs `proto` to completion against `source`; `truth` gives the honest answer to a question.
pub fn drive<P: Protocol>(
    proto: &mut P,
    env: &mut P::Env,
    truth: impl Fn(&P::Question) -> bool,
    source: &mut dyn AnswerSource,
    max_questions: u64,
    mut on_answer: impl FnMut(&mut P, &P::Question, bool, bool),
) -> Result<DriveResult<P::Output>> {
    let mut questions = 0u64;
    let mut lies = 0u32;
    loop {
        match proto.poll(env)? {
            Poll::Done(output) => return Ok(DriveResult { output, questions, lies }),
            Poll::Ask(q) => {
                if questions >= max_questions {
                    return Err(Error::QuestionLimit(max_questions));
                }
                let honest = truth(&q);
                let yes = source.answer(honest);
                let lie = yes != honest;
                questions += 1;
                lies += lie as u32;
                proto.feed(env, yes)?;
                on_answer(proto, &q, yes, lie);
            }
        }
    }
}

pub struct SearchRun {
    pub result: DriveResult<usize>,
    pub transcript: Vec<TranscriptRecord>,
    pub max_depth: usize,
}

/// Drives a search protocol for hidden element `x`, optionally recording a transcript.
pub fn drive_search<P: SearchProtocol>(
    proto: &mut P,
    env: &mut Placement,
    x: usize,
    source: &mut dyn AnswerSource,
    max_questions: u64,
    record: bool,
) -> Result<SearchRun> {
    let mut transcript = Vec::new();
    let mut t = 0u64;
    let mut max_depth = proto.depth_current();
    let result = drive(proto, env, |q: &SearchQuestion| q.truth(x), source, max_questions, |p, q, yes, lie| {
        t += 1;
        let event = p.take_event();
        max_depth = max_depth.max(p.depth_current());
        if record {
            transcript.push(TranscriptRecord {
                t,
                kind: q.kind,
                boundary_index: q.query.boundary_index,
                answer_bit: (!yes) as u8,
                lie,
                depth_current: p.depth_current(),
                depth_last_verified: p.depth_last_verified(),
                event,
            });
        }
    })?;
    Ok(SearchRun { result, transcript, max_depth })
}
