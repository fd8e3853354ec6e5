use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::EnumError;

/// A named place on the office floor plan.
///
/// `StartingPoint` is where the robot waits before a task runs. `Somewhere`
/// stands for a place chosen at run time; it may appear in drawings and in
/// branch-bound gotos but never as a concrete navigation target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    ReceptionArea,
    MeetingRoom,
    WorkExhibitionArea,
    LeadersOffice,
    EmployeeOfficeArea,
    CreationStudio,
    Gym,
    LivingRoom,
    Pantry,
    StartingPoint,
    Somewhere,
}

impl Location {
    pub const ALL: [Location; 11] = [
        Location::ReceptionArea,
        Location::MeetingRoom,
        Location::WorkExhibitionArea,
        Location::LeadersOffice,
        Location::EmployeeOfficeArea,
        Location::CreationStudio,
        Location::Gym,
        Location::LivingRoom,
        Location::Pantry,
        Location::StartingPoint,
        Location::Somewhere,
    ];

    /// The nine destinations a task can navigate to.
    pub const PLACES: [Location; 9] = [
        Location::ReceptionArea,
        Location::MeetingRoom,
        Location::WorkExhibitionArea,
        Location::LeadersOffice,
        Location::EmployeeOfficeArea,
        Location::CreationStudio,
        Location::Gym,
        Location::LivingRoom,
        Location::Pantry,
    ];

    /// Canonical identifier, as used on the wire and in IR text.
    pub fn as_str(self) -> &'static str {
        match self {
            Location::ReceptionArea => "ReceptionArea",
            Location::MeetingRoom => "MeetingRoom",
            Location::WorkExhibitionArea => "WorkExhibitionArea",
            Location::LeadersOffice => "LeadersOffice",
            Location::EmployeeOfficeArea => "EmployeeOfficeArea",
            Location::CreationStudio => "CreationStudio",
            Location::Gym => "Gym",
            Location::LivingRoom => "LivingRoom",
            Location::Pantry => "Pantry",
            Location::StartingPoint => "StartingPoint",
            Location::Somewhere => "Somewhere",
        }
    }

    /// Human-readable name, as written in draw scripts.
    pub fn display_name(self) -> &'static str {
        match self {
            Location::ReceptionArea => "Reception area",
            Location::MeetingRoom => "Meeting room",
            Location::WorkExhibitionArea => "Work exhibition area",
            Location::LeadersOffice => "Leader's office",
            Location::EmployeeOfficeArea => "Employee office area",
            Location::CreationStudio => "Creation studio",
            Location::Gym => "Gym",
            Location::LivingRoom => "Living room",
            Location::Pantry => "Pantry",
            Location::StartingPoint => "Starting point",
            Location::Somewhere => "somewhere",
        }
    }

    /// True for every location the robot can physically stand at.
    pub fn is_concrete(self) -> bool {
        self != Location::Somewhere
    }
}

/// Alias table, keyed by normalized spelling. Canonical identifiers and
/// display names are matched separately.
pub const LOCATION_ALIASES: &[(&str, Location)] = &[
    ("reception", Location::ReceptionArea),
    ("work display area", Location::WorkExhibitionArea),
    ("exhibition area", Location::WorkExhibitionArea),
    ("leaders office", Location::LeadersOffice),
    ("leader office", Location::LeadersOffice),
    ("administrator's seat", Location::EmployeeOfficeArea),
    ("administrators seat", Location::EmployeeOfficeArea),
    ("staff office area", Location::EmployeeOfficeArea),
    ("staff area", Location::EmployeeOfficeArea),
    ("employee area", Location::EmployeeOfficeArea),
    ("digital media creation studio", Location::CreationStudio),
    ("creative studio", Location::CreationStudio),
    ("studio", Location::CreationStudio),
    ("fitness area", Location::Gym),
    ("start point", Location::StartingPoint),
    ("start", Location::StartingPoint),
];

fn normalize(raw: &str) -> String {
    let lowered = raw.trim().replace(['\u{2019}', '\u{2018}', '`'], "'").to_lowercase();
    let collapsed = lowered.split_whitespace().collect::<Vec<_>>().join(" ");
    let trimmed = collapsed.trim_end_matches('.');
    trimmed.strip_prefix("the ").unwrap_or(trimmed).to_string()
}

/// Resolves any known spelling of a place to its canonical location.
pub fn canonicalize_location(raw: &str) -> Result<Location, EnumError> {
    let key = normalize(raw);
    let squashed: String = key.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
    for loc in Location::ALL {
        if squashed == loc.as_str().to_lowercase() || key == normalize(loc.display_name()) {
            return Ok(loc);
        }
    }
    LOCATION_ALIASES
        .iter()
        .find(|(alias, _)| *alias == key)
        .map(|(_, loc)| *loc)
        .ok_or_else(|| EnumError {
            kind: "location",
            value: raw.to_string(),
        })
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Location {
    type Err = EnumError;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        canonicalize_location(raw)
    }
}

impl Serialize for Location {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Location {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        canonicalize_location(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    #[test]
    fn display_names_resolve() {
        assert_eq!(canonicalize_location("Reception area").unwrap(), Location::ReceptionArea);
        assert_eq!(canonicalize_location("  leader’s OFFICE ").unwrap(), Location::LeadersOffice);
        assert_eq!(canonicalize_location("Starting point").unwrap(), Location::StartingPoint);
        assert_eq!(canonicalize_location("somewhere").unwrap(), Location::Somewhere);
    }

    #[test]
    fn first_list_names_resolve_to_second_list() {
        assert_eq!(
            canonicalize_location("digital media creation studio").unwrap(),
            Location::CreationStudio
        );
        assert_eq!(
            canonicalize_location("administrator's seat").unwrap(),
            Location::EmployeeOfficeArea
        );
    }

    #[test]
    fn canonical_identifiers_resolve() {
        for loc in Location::ALL {
            assert_eq!(canonicalize_location(loc.as_str()).unwrap(), loc);
            assert_eq!(canonicalize_location(loc.display_name()).unwrap(), loc);
        }
        assert_eq!(canonicalize_location("the pantry").unwrap(), Location::Pantry);
    }

    #[test]
    fn unknown_place_is_rejected() {
        let err = canonicalize_location("warehouse").unwrap_err();
        assert_eq!(err.kind, "location");
        assert_eq!(err.value, "warehouse");
        assert!(canonicalize_location("").is_err());
    }

    #[test]
    fn alias_table_is_a_function() {
        let mut seen: HashMap<String, Location> = HashMap::new();
        let display = Location::ALL.iter().map(|l| (normalize(l.display_name()), *l));
        let aliases = LOCATION_ALIASES.iter().map(|(a, l)| (normalize(a), *l));
        for (key, loc) in display.chain(aliases) {
            if let Some(prev) = seen.insert(key.clone(), loc) {
                assert_eq!(prev, loc, "`{key}` maps to two locations");
            }
        }
    }

    #[test]
    fn serde_uses_canonical_identifier() {
        let json = serde_json::to_string(&Location::LeadersOffice).unwrap();
        assert_eq!(json, "\"LeadersOffice\"");
        let back: Location = serde_json::from_str("\"leader's office\"").unwrap();
        assert_eq!(back, Location::LeadersOffice);
    }
}
