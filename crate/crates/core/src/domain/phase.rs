use super::closed_enum;

closed_enum! {
    /// Where a customization session stands.
    pub enum DialoguePhase("phase") {
        Communicating => "communicating",
        /// The full task has been presented and awaits the user's acceptance.
        ConfirmPending => "confirmPending",
        Confirmed => "confirmed",
        Deployed => "deployed",
        Testing => "testing",
    }
}

impl Default for DialoguePhase {
    fn default() -> Self {
        DialoguePhase::Communicating
    }
}

impl DialoguePhase {
    /// Legal phase transitions. A modification after deployment reopens
    /// the conversation (`Deployed -> Communicating`).
    pub fn can_transition(self, to: DialoguePhase) -> bool {
        use DialoguePhase::*;
        matches!(
            (self, to),
            (Communicating, Communicating)
                | (Communicating, ConfirmPending)
                | (ConfirmPending, ConfirmPending)
                | (ConfirmPending, Communicating)
                | (ConfirmPending, Confirmed)
                | (Confirmed, Deployed)
                | (Deployed, Testing)
                | (Testing, Deployed)
                | (Deployed, Communicating)
        )
    }

    /// Phases in which the user may speak to the dialogue.
    pub fn accepts_utterances(self) -> bool {
        matches!(
            self,
            DialoguePhase::Communicating | DialoguePhase::ConfirmPending | DialoguePhase::Deployed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn main_path_is_legal() {
        use DialoguePhase::*;
        let path = [Communicating, ConfirmPending, Confirmed, Deployed, Testing, Deployed];
        for w in path.windows(2) {
            assert!(w[0].can_transition(w[1]), "{:?} -> {:?}", w[0], w[1]);
        }
    }

    #[test]
    fn shortcuts_are_illegal() {
        use DialoguePhase::*;
        assert!(!Communicating.can_transition(Confirmed));
        assert!(!Communicating.can_transition(Deployed));
        assert!(!Confirmed.can_transition(Testing));
        assert!(!Testing.can_transition(Communicating));
        assert!(!Confirmed.can_transition(Communicating));
    }

    #[test]
    fn wire_spelling() {
        assert_eq!(
            serde_json::to_string(&DialoguePhase::ConfirmPending).unwrap(),
            "\"confirmPending\""
        );
    }
}
