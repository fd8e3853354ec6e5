//! Floor-plan geometry: where each place is and how fast the robot moves.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{canonicalize_location, Location};
use crate::scalar::Scalar;

/// The bundled office layout.
pub const DEFAULT_MAP_JSON: &str = include_str!("../../assets/default_map.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Point<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point<S> {
    pub fn new(x: S, y: S) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point<S>) -> S {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(self, other: Point<S>) -> Point<S> {
        let two = S::one() + S::one();
        Point::new((self.x + other.x) / two, (self.y + other.y) / two)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("map document is not valid JSON: {0}")]
    Parse(String),
    #[error("map is missing location {0}")]
    MissingLocation(Location),
    #[error("unknown location `{0}` in map")]
    UnknownLocation(String),
    #[error("location {0} is listed twice")]
    DuplicateLocation(Location),
    #[error("`somewhere` is not a place and cannot have coordinates")]
    SomewherePlaced,
    #[error("coordinates of {0} are not finite")]
    NonFinite(Location),
    #[error("robot speed must be finite and positive, got {0}")]
    BadSpeed(String),
}

/// Validated floor plan: every concrete place plus the starting point, with
/// finite coordinates in meters and a positive speed in meters per second.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct MapGeometry<S> {
    speed: S,
    locations: BTreeMap<Location, Point<S>>,
}

#[derive(Deserialize)]
#[serde(bound = "S: Scalar")]
struct MapDocument<S> {
    #[serde(default = "default_speed")]
    speed: S,
    locations: serde_json::Map<String, serde_json::Value>,
}

fn default_speed<S: Scalar>() -> S {
    S::one()
}

impl<S: Scalar> MapGeometry<S> {
    /// Builds a map from already-canonical coordinates.
    pub fn new(speed: S, locations: BTreeMap<Location, Point<S>>) -> Result<Self, MapError> {
        if !(speed.is_finite() && speed > S::zero()) {
            return Err(MapError::BadSpeed(speed.to_string()));
        }
        if locations.contains_key(&Location::Somewhere) {
            return Err(MapError::SomewherePlaced);
        }
        for loc in Location::PLACES.iter().chain([Location::StartingPoint].iter()) {
            match locations.get(loc) {
                None => return Err(MapError::MissingLocation(*loc)),
                Some(p) if !(p.x.is_finite() && p.y.is_finite()) => return Err(MapError::NonFinite(*loc)),
                Some(_) => {}
            }
        }
        Ok(MapGeometry { speed, locations })
    }

    pub fn speed(&self) -> S {
        self.speed
    }

    pub fn position(&self, loc: Location) -> Option<Point<S>> {
        self.locations.get(&loc).copied()
    }

    pub fn locations(&self) -> impl Iterator<Item = (Location, Point<S>)> + '_ {
        self.locations.iter().map(|(l, p)| (*l, *p))
    }

    /// Straight-line travel time between two places, in seconds.
    pub fn travel_seconds(&self, from: Location, to: Location) -> Option<S> {
        Some(self.position(from)?.distance(self.position(to)?) / self.speed)
    }

    /// Smallest and largest coordinates over all places.
    pub fn bounds(&self) -> (Point<S>, Point<S>) {
        let mut lo = Point::new(S::infinity(), S::infinity());
        let mut hi = Point::new(S::neg_infinity(), S::neg_infinity());
        for p in self.locations.values() {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }
}

/// Parses and validates a map document
/// `{"speed": 1.0, "locations": {"ReceptionArea": {"x": .., "y": ..}, ..}}`.
/// Location names may use any known spelling.
pub fn load_map<S: Scalar>(document: &str) -> Result<MapGeometry<S>, MapError> {
    let doc: MapDocument<S> = serde_json::from_str(document).map_err(|e| MapError::Parse(e.to_string()))?;
    let mut locations = BTreeMap::new();
    for (name, value) in doc.locations {
        let loc = canonicalize_location(&name).map_err(|_| MapError::UnknownLocation(name.clone()))?;
        let point: Point<S> = serde_json::from_value(value).map_err(|e| MapError::Parse(format!("{name}: {e}")))?;
        if locations.insert(loc, point).is_some() {
            return Err(MapError::DuplicateLocation(loc));
        }
    }
    MapGeometry::new(doc.speed, locations)
}

/// The bundled default map.
pub fn default_map<S: Scalar>() -> MapGeometry<S> {
    load_map(DEFAULT_MAP_JSON).expect("bundled map is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn without(name: &str) -> String {
        let mut doc: serde_json::Value = serde_json::from_str(DEFAULT_MAP_JSON).unwrap();
        doc["locations"].as_object_mut().unwrap().remove(name);
        doc.to_string()
    }

    #[test]
    fn bundled_map_has_all_places() {
        let map = default_map::<f64>();
        assert_eq!(map.locations().count(), 10);
        assert_eq!(map.speed(), 1.0);
        let map32 = default_map::<f32>();
        assert_eq!(map32.travel_seconds(Location::StartingPoint, Location::Pantry), Some(6.0));
    }

    #[test]
    fn missing_pantry() {
        assert_eq!(
            load_map::<f64>(&without("Pantry")).unwrap_err(),
            MapError::MissingLocation(Location::Pantry)
        );
    }

    #[test]
    fn zero_speed() {
        let doc = DEFAULT_MAP_JSON.replace("\"speed\": 1.0", "\"speed\": 0.0");
        assert!(matches!(load_map::<f64>(&doc), Err(MapError::BadSpeed(_))));
        let doc = DEFAULT_MAP_JSON.replace("\"speed\": 1.0", "\"speed\": -2");
        assert!(matches!(load_map::<f64>(&doc), Err(MapError::BadSpeed(_))));
    }

    #[test]
    fn aliases_and_rejections() {
        let doc = DEFAULT_MAP_JSON.replace("\"Gym\"", "\"fitness area\"");
        assert!(load_map::<f64>(&doc).is_ok());
        let doc = DEFAULT_MAP_JSON.replace("\"Gym\"", "\"Warehouse\"");
        assert_eq!(load_map::<f64>(&doc).unwrap_err(), MapError::UnknownLocation("Warehouse".into()));
        let doc = DEFAULT_MAP_JSON.replace("\"Gym\"", "\"pantry\"");
        assert!(matches!(load_map::<f64>(&doc), Err(MapError::DuplicateLocation(_))));
        let doc = DEFAULT_MAP_JSON.replace("\"Gym\": { \"x\": 20.0", "\"somewhere\": {\"x\": 1.0, \"y\": 1.0}, \"Gym\": { \"x\": 20.0");
        assert_eq!(load_map::<f64>(&doc).unwrap_err(), MapError::SomewherePlaced);
        assert!(matches!(load_map::<f64>("{"), Err(MapError::Parse(_))));
    }
}
