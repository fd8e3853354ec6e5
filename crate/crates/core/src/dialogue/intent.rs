//! Rule-table intent classification.

use std::sync::OnceLock;

use regex::Regex;

use crate::domain::{closed_enum, DialoguePhase, LOCATION_ALIASES, Location};

closed_enum! {
    /// What a user utterance tries to do.
    pub enum IntentClass("intent") {
        /// Off-topic or beyond what the robot can do.
        Unrelated => "unrelated",
        /// Adds, removes or changes task steps.
        Modify => "modify",
        /// Asks about the task as it stands.
        Inquire => "inquire",
        /// Asks the robot to present the whole task for review.
        ConfirmRequest => "confirmRequest",
        /// Says the description is finished.
        Complete => "complete",
        /// Accepts the presented task.
        FinalConfirm => "finalConfirm",
    }
}

const STRONG_EDIT: &[&str] = &[
    "add", "change", "modify", "remove", "delete", "replace", "insert", "instead", "cancel", "drop", "swap", "edit",
    "update", "skip",
];

const ACTIONS: &[&str] = &[
    "go", "goes", "lead", "guide", "take", "bring", "escort", "ask", "say", "tell", "greet", "wait", "detect", "notify",
    "remind", "introduce", "patrol", "visit", "move", "navigate", "announce", "inform", "check", "find", "look",
    "search", "start", "activate", "then", "after", "before", "first", "next", "finally", "develop", "create",
    "build", "want", "should", "need", "keyword", "return", "come", "explain", "repeat", "relay", "report",
];

const PLAN_WORDS: &[&str] = &[
    "task", "tasks", "plan", "step", "steps", "flow", "route", "process", "service", "program", "robot", "order",
    "sequence", "far", "currently", "current", "now",
];

const QUESTION_OPENERS: &[&str] = &[
    "what", "which", "how", "where", "when", "who", "why", "is", "are", "does", "do", "can", "could", "will", "would",
];

fn patterns() -> &'static [(IntentClass, Regex)] {
    static CELL: OnceLock<Vec<(IntentClass, Regex)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let rx = |s: &str| Regex::new(&format!("(?i){s}")).expect("static pattern");
        vec![
            (
                IntentClass::FinalConfirm,
                rx(r"^\s*(yes|yeah|yep|ok|okay|sure|correct|right|perfect|great|confirm(ed)?|approved?|agreed?|looks good|that'?s (right|correct|it|good))\b|\b(i confirm|confirm it|confirmed|yes,? (that'?s )?correct|go ahead|sounds good|all correct|no problem)\b"),
            ),
            (
                IntentClass::Complete,
                rx(r"\b(that'?s all|that is all|i'?m (done|finished)|i am (done|finished)|(finished|done) (describing|explaining|with)|nothing (else|more)|no more (steps|changes|requirements)|that'?s everything|that completes|complete(d)? the (task|description))\b|^\s*(done|finished|complete)[.!]?\s*$"),
            ),
            (
                IntentClass::ConfirmRequest,
                rx(r"\b(confirm|review|summari[sz]e|recap|go over|walk me through|repeat the (whole |full |entire )?(task|plan|flow)|show me the (whole|full|entire|complete) (task|plan|flow))\b"),
            ),
        ]
    })
}

fn words(utterance: &str) -> Vec<String> {
    utterance
        .split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect()
}

fn mentions_place(utterance: &str) -> bool {
    let lower = utterance.to_lowercase();
    Location::PLACES
        .iter()
        .any(|l| lower.contains(&l.display_name().to_lowercase()))
        || LOCATION_ALIASES.iter().any(|(alias, _)| lower.contains(alias))
}

fn pattern(class: IntentClass) -> &'static Regex {
    &patterns().iter().find(|(c, _)| *c == class).expect("pattern present").1
}

/// Classifies an utterance with a fixed rule table, in priority order:
///
/// 1. in `ConfirmPending`, an acceptance without edit verbs is `FinalConfirm`
/// 2. a statement that the description is over is `Complete`
/// 3. a request to review the whole task is `ConfirmRequest`
/// 4. an explicit edit verb is `Modify`
/// 5. a question about the task is `Inquire`
/// 6. robot actions or known places are `Modify`
/// 7. anything else is `Unrelated`
///
/// After deployment only `Modify`, `Inquire` and `Unrelated` apply.
pub fn classify_intent(utterance: &str, phase: DialoguePhase) -> IntentClass {
    let words = words(utterance);
    let has = |set: &[&str]| words.iter().any(|w| set.contains(&w.as_str()));
    let edit = has(STRONG_EDIT);
    let end = utterance.trim_end();
    let question = end.ends_with('?')
        || (!end.ends_with(['.', '!']) && words.first().is_some_and(|w| QUESTION_OPENERS.contains(&w.as_str())));

    let class = if phase == DialoguePhase::ConfirmPending && !edit && pattern(IntentClass::FinalConfirm).is_match(utterance)
    {
        IntentClass::FinalConfirm
    } else if pattern(IntentClass::Complete).is_match(utterance) {
        IntentClass::Complete
    } else if !edit && pattern(IntentClass::ConfirmRequest).is_match(utterance) {
        IntentClass::ConfirmRequest
    } else if edit {
        IntentClass::Modify
    } else if question && has(PLAN_WORDS) {
        IntentClass::Inquire
    } else if !question && (has(ACTIONS) || mentions_place(utterance)) {
        IntentClass::Modify
    } else {
        IntentClass::Unrelated
    };

    match (phase, class) {
        (DialoguePhase::Deployed, IntentClass::Modify | IntentClass::Inquire) => class,
        (DialoguePhase::Deployed, _) => IntentClass::Unrelated,
        _ => class,
    }
}
