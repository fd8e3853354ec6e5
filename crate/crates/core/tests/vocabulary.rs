use std::fmt::Display;
use std::str::FromStr;

use proptest::prelude::*;
use serde::de::DeserializeOwned;
use taskviz_core::dialogue::IntentClass;
use taskviz_core::domain::{
    canonicalize_location, Color, DialoguePhase, DrawMode, FeedbackType, Icon, LineType, Location, OutputState,
};

/// Parsing either yields a member whose canonical spelling matches the
/// input case-insensitively, or fails. Serde agrees with `FromStr`.
fn closed<T>(all: &[T], raw: &str) -> Result<(), TestCaseError>
where
    T: FromStr + Display + PartialEq + std::fmt::Debug + DeserializeOwned + Copy,
{
    let json = serde_json::to_string(raw).unwrap();
    match raw.parse::<T>() {
        Ok(v) => {
            prop_assert!(all.contains(&v));
            prop_assert!(v.to_string().eq_ignore_ascii_case(raw.trim()));
            prop_assert_eq!(serde_json::from_str::<T>(&json).unwrap(), v);
        }
        Err(_) => {
            prop_assert!(all.iter().all(|v| !v.to_string().eq_ignore_ascii_case(raw.trim())));
            prop_assert!(serde_json::from_str::<T>(&json).is_err());
        }
    }
    Ok(())
}

fn spellings() -> impl Strategy<Value = String> {
    let known = [
        "red", "GREEN", " gray ", "grey", "wakeup", "humanDetect", "none", "ADD", "del", "delete", "solid", "dashed",
        "feedback", "confirm", "communicating", "confirmed", "confirmPending", "deployed", "testing", "modify",
        "inquire", "finalConfirm", "unrelated", "complete", "confirmRequest", "",
    ];
    prop_oneof![prop::sample::select(known.to_vec()).prop_map(String::from), "[a-zA-Z ]{0,14}"]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn enumerations_are_closed(raw in spellings()) {
        closed(Color::ALL, &raw)?;
        closed(Icon::ALL, &raw)?;
        closed(FeedbackType::ALL, &raw)?;
        closed(LineType::ALL, &raw)?;
        closed(DrawMode::ALL, &raw)?;
        closed(OutputState::ALL, &raw)?;
        closed(DialoguePhase::ALL, &raw)?;
        closed(IntentClass::ALL, &raw)?;
    }

    #[test]
    fn locations_canonicalize_or_fail(raw in "[a-zA-Z' ]{0,24}") {
        if let Ok(loc) = canonicalize_location(&raw) {
            prop_assert!(Location::ALL.contains(&loc));
            prop_assert_eq!(canonicalize_location(loc.display_name()).unwrap(), loc);
        }
    }
}

#[test]
fn every_location_round_trips() {
    for loc in Location::ALL.iter() {
        assert_eq!(canonicalize_location(loc.as_str()).unwrap(), *loc);
        assert_eq!(canonicalize_location(loc.display_name()).unwrap(), *loc);
        assert_eq!(canonicalize_location(&loc.display_name().to_uppercase()).unwrap(), *loc);
        let json = serde_json::to_string(loc).unwrap();
        assert_eq!(serde_json::from_str::<Location>(&json).unwrap(), *loc);
    }
    assert!(canonicalize_location("Basement").is_err());
}

#[test]
fn phase_machine() {
    use DialoguePhase::*;
    let legal = [
        (Communicating, Communicating),
        (Communicating, ConfirmPending),
        (ConfirmPending, ConfirmPending),
        (ConfirmPending, Communicating),
        (ConfirmPending, Confirmed),
        (Confirmed, Deployed),
        (Deployed, Testing),
        (Testing, Deployed),
        (Deployed, Communicating),
    ];
    for from in DialoguePhase::ALL {
        for to in DialoguePhase::ALL {
            assert_eq!(from.can_transition(*to), legal.contains(&(*from, *to)), "{from} -> {to}");
        }
    }
}
