use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Class names of the KITTI 2D benchmark as they appear in label files.
pub const KITTI_CLASSES: [&str; 8] = [
    "Pedestrian",
    "Cyclist",
    "Car",
    "Van",
    "Misc",
    "Truck",
    "Person_sitting",
    "Tram",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("unknown class '{name}'")]
    Unknown { name: String },
    #[error("class registry is empty")]
    EmptyRegistry,
    #[error("class '{name}' listed twice in registry")]
    Duplicate { name: String },
    #[error("class name '{name}' must be a non-empty token without whitespace or '#'")]
    InvalidName { name: String },
}

/// A class label that has been resolved against a [`ClassRegistry`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassId(String);

impl ClassId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ordered set of class names declared for one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ClassRegistry {
    names: Vec<String>,
}

impl ClassRegistry {
    pub fn new<I, S>(names: I) -> Result<Self, ClassError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ClassError::EmptyRegistry);
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains('#') || n.chars().any(char::is_whitespace) {
                return Err(ClassError::InvalidName { name: n.clone() });
            }
            if names[..i].contains(n) {
                return Err(ClassError::Duplicate { name: n.clone() });
            }
        }
        Ok(Self { names })
    }

    /// The eight KITTI classes.
    pub fn kitti() -> Self {
        Self::new(KITTI_CLASSES).expect("static registry is valid")
    }

    pub fn resolve(&self, name: &str) -> Result<ClassId, ClassError> {
        if self.names.iter().any(|n| n == name) {
            Ok(ClassId(name.to_string()))
        } else {
            Err(ClassError::Unknown {
                name: name.to_string(),
            })
        }
    }

    pub fn contains(&self, class: &ClassId) -> bool {
        self.names.contains(&class.0)
    }

    pub fn index_of(&self, class: &ClassId) -> Option<usize> {
        self.names.iter().position(|n| *n == class.0)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.names.iter().map(|n| ClassId(n.clone()))
    }

    pub fn get(&self, index: usize) -> Option<ClassId> {
        self.names.get(index).map(|n| ClassId(n.clone()))
    }
}

impl Default for ClassRegistry {
    fn default() -> Self {
        Self::kitti()
    }
}

impl TryFrom<Vec<String>> for ClassRegistry {
    type Error = ClassError;

    fn try_from(names: Vec<String>) -> Result<Self, Self::Error> {
        Self::new(names)
    }
}

impl From<ClassRegistry> for Vec<String> {
    fn from(r: ClassRegistry) -> Self {
        r.names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registry_has_eight_classes() {
        let r = ClassRegistry::default();
        assert_eq!(r.len(), 8);
        assert!(r.resolve("Person_sitting").is_ok());
        assert_eq!(r.index_of(&r.resolve("Tram").unwrap()), Some(7));
    }

    #[test]
    fn unknown_class_rejected() {
        let r = ClassRegistry::kitti();
        assert_eq!(
            r.resolve("Bus"),
            Err(ClassError::Unknown { name: "Bus".into() })
        );
    }

    #[test]
    fn registry_validation() {
        assert_eq!(
            ClassRegistry::new(Vec::<String>::new()),
            Err(ClassError::EmptyRegistry)
        );
        assert!(matches!(
            ClassRegistry::new(["Car", "Car"]),
            Err(ClassError::Duplicate { .. })
        ));
        assert!(matches!(
            ClassRegistry::new(["Person Sitting"]),
            Err(ClassError::InvalidName { .. })
        ));
    }
}
