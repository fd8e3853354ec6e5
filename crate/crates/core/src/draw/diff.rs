use std::collections::HashSet;

use crate::domain::{DrawProgram, FeedbackType};

use super::ElementKey;

/// Annotates `new` against `old`.
///
/// Elements whose key exists in both drawings come first, in `old` order,
/// marked `none` and carrying `new`'s attributes. Then come `old`'s
/// vanished elements marked `del`, then `new`'s additions marked `add`.
pub fn diff_programs(old: &DrawProgram, new: &DrawProgram) -> DrawProgram {
    let old_keys: HashSet<ElementKey> = old.iter().map(ElementKey::of).collect();
    let new_keys: HashSet<ElementKey> = new.iter().map(ElementKey::of).collect();

    let mut out = Vec::with_capacity(old.len() + new.len());
    for cmd in old {
        let key = ElementKey::of(cmd);
        if new_keys.contains(&key) {
            let updated = new
                .iter()
                .find(|c| ElementKey::of(c) == key)
                .expect("key present in new");
            out.push(updated.clone().with_feedback(FeedbackType::None));
        }
    }
    out.extend(
        old.iter()
            .filter(|c| !new_keys.contains(&ElementKey::of(c)))
            .map(|c| c.clone().with_feedback(FeedbackType::Del)),
    );
    out.extend(
        new.iter()
            .filter(|c| !old_keys.contains(&ElementKey::of(c)))
            .map(|c| c.clone().with_feedback(FeedbackType::Add)),
    );
    DrawProgram::new(out)
}

/// Returns the program with every element marked `none`.
pub fn strip_feedback(program: &DrawProgram) -> DrawProgram {
    program
        .iter()
        .map(|c| c.clone().with_feedback(FeedbackType::None))
        .collect()
}

/// Returns the program without its `del` elements.
pub fn without_deleted(program: &DrawProgram) -> DrawProgram {
    program
        .iter()
        .filter(|c| c.feedback() != FeedbackType::Del)
        .cloned()
        .collect()
}

/// Keys carrying a given annotation, in program order.
pub fn keys_with(program: &DrawProgram, feedback: FeedbackType) -> Vec<ElementKey> {
    program
        .iter()
        .filter(|c| c.feedback() == feedback)
        .map(ElementKey::of)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::draw::parse_draw_script;

    fn prog(src: &str) -> DrawProgram {
        parse_draw_script(src).unwrap()
    }

    const A: &str = "mark(\"Reception area\", \"green\", 1, 1)\n";
    const B: &str = "link(\"Reception area\", \"Gym\", \"green\", \"solid\", \"b\", 2)\n";
    const C: &str = "link(\"Gym\", \"Pantry\", \"red\", \"solid\", \"c\", 3)\n";

    #[test]
    fn identity_diff() {
        let a = prog(A);
        let d = diff_programs(&a, &a);
        assert_eq!(d, a);
    }

    #[test]
    fn replace_one_element() {
        let old = prog(&format!("{A}{B}"));
        let new = prog(&format!("{A}{C}"));
        let d = diff_programs(&old, &new);
        let annotated: Vec<_> = d.iter().map(|c| (ElementKey::of(c), c.feedback())).collect();
        assert_eq!(
            annotated,
            vec![
                (ElementKey::of(&old.commands()[0]), FeedbackType::None),
                (ElementKey::of(&old.commands()[1]), FeedbackType::Del),
                (ElementKey::of(&new.commands()[1]), FeedbackType::Add),
            ]
        );
    }

    #[test]
    fn first_draw_is_all_add() {
        let new = prog(&format!("{A}{B}"));
        let d = diff_programs(&DrawProgram::default(), &new);
        assert!(d.iter().all(|c| c.feedback() == FeedbackType::Add));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn recolour_is_an_in_place_update() {
        let old = prog(A);
        let new = prog("mark(\"Reception area\", \"blue\", 1, 4)");
        let d = diff_programs(&old, &new);
        assert_eq!(d, new);
    }
}
