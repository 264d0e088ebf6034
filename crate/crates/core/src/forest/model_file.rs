//! Versioned JSON model file:
//!
//! ```json
//! {"format_version": 1, "config": {…}, "features": {…},
//!  "normalization": {"ranges": […]},
//!  "class_order": ["Personal", …], "trees": [node, …]}
//! ```
//!
//! A node is either `{"feature": i, "threshold": x, "left": node, "right": node}`
//! or `{"counts": [c0, …, c5]}`. Reals are written in shortest round-trip form.

use std::fmt;

use serde::de::{self, IgnoredAny, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ForestError, RandomForestModel, TrainConfig, TreeNode};
use crate::features::{FeatureConfig, NormalizationParams, FEATURE_COUNT};
use crate::ingest::UserClass;

pub const MODEL_FORMAT_VERSION: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("malformed model file: {0}")]
    Parse(String),
    #[error("unsupported model format_version {found} (this build reads {MODEL_FORMAT_VERSION})")]
    UnsupportedVersion { found: u64 },
    #[error("class order {0:?} does not match this build")]
    ClassOrder(Vec<String>),
    #[error("inconsistent model: {0}")]
    Invalid(String),
}

impl Serialize for TreeNode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            TreeNode::Leaf { counts } => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("counts", counts)?;
                map.end()
            }
            TreeNode::Internal { feature, threshold, left, right } => {
                let mut map = serializer.serialize_map(Some(4))?;
                map.serialize_entry("feature", feature)?;
                map.serialize_entry("threshold", threshold)?;
                map.serialize_entry("left", left)?;
                map.serialize_entry("right", right)?;
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for TreeNode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_map(NodeVisitor)
    }
}

struct NodeVisitor;

impl<'de> Visitor<'de> for NodeVisitor {
    type Value = TreeNode;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a tree node object")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<TreeNode, A::Error> {
        let mut counts = None;
        let mut feature = None;
        let mut threshold = None;
        let mut left = None;
        let mut right = None;
        while let Some(key) = map.next_key::<String>()? {
            match key.as_str() {
                "counts" => counts = Some(map.next_value::<[u64; UserClass::COUNT]>()?),
                "feature" => feature = Some(map.next_value::<usize>()?),
                "threshold" => threshold = Some(map.next_value::<f64>()?),
                "left" => left = Some(Box::new(map.next_value::<TreeNode>()?)),
                "right" => right = Some(Box::new(map.next_value::<TreeNode>()?)),
                _ => {
                    map.next_value::<IgnoredAny>()?;
                }
            }
        }
        match (counts, feature, threshold, left, right) {
            (Some(counts), None, None, None, None) => Ok(TreeNode::Leaf { counts }),
            (None, Some(feature), Some(threshold), Some(left), Some(right)) => {
                Ok(TreeNode::Internal { feature, threshold, left, right })
            }
            _ => Err(de::Error::custom(
                "node needs either `counts` or all of `feature`, `threshold`, `left`, `right`",
            )),
        }
    }
}

#[derive(Serialize)]
struct ModelFileOut<'a> {
    format_version: u64,
    config: &'a TrainConfig,
    features: &'a FeatureConfig,
    normalization: &'a NormalizationParams,
    class_order: [&'static str; UserClass::COUNT],
    trees: &'a [TreeNode],
}

#[derive(Deserialize)]
struct ModelFileIn {
    config: TrainConfig,
    #[serde(default)]
    features: FeatureConfig,
    normalization: NormalizationParams,
    class_order: Vec<String>,
    trees: Vec<TreeNode>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u64,
}

/// Deserializes without serde_json's nesting limit; deep trees are handled
/// on a growable heap stack instead of the thread stack.
fn from_json_unbounded<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, serde_json::Error> {
    let mut json = serde_json::Deserializer::from_str(text);
    json.disable_recursion_limit();
    let value = T::deserialize(serde_stacker::Deserializer::new(&mut json))?;
    json.end()?;
    Ok(value)
}

impl RandomForestModel {
    pub fn class_order(&self) -> [UserClass; UserClass::COUNT] {
        UserClass::ALL
    }

    pub fn to_json(&self) -> String {
        let file = ModelFileOut {
            format_version: MODEL_FORMAT_VERSION,
            config: &self.config,
            features: &self.features,
            normalization: &self.normalization,
            class_order: UserClass::names(),
            trees: &self.trees,
        };
        serde_json::to_string(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let probe: VersionProbe =
            from_json_unbounded(text).map_err(|e| ModelError::Parse(e.to_string()))?;
        if probe.format_version != MODEL_FORMAT_VERSION {
            return Err(ModelError::UnsupportedVersion { found: probe.format_version });
        }
        let file: ModelFileIn =
            from_json_unbounded(text).map_err(|e| ModelError::Parse(e.to_string()))?;
        if file.class_order != UserClass::names() {
            return Err(ModelError::ClassOrder(file.class_order));
        }
        let invalid = |msg: String| Err(ModelError::Invalid(msg));
        if let Err(ForestError::InvalidConfig(msg)) = file.config.validate() {
            return invalid(msg);
        }
        file.features.validate().map_err(ModelError::Invalid)?;
        if file.trees.len() != file.config.n_trees {
            return invalid(format!("{} trees but config.n_trees = {}", file.trees.len(), file.config.n_trees));
        }
        if !file.normalization.is_valid() {
            return invalid("normalization ranges must be finite with min <= max".into());
        }
        for (t, tree) in file.trees.iter().enumerate() {
            check_tree(tree).map_err(|msg| ModelError::Invalid(format!("tree {t}: {msg}")))?;
        }
        Ok(RandomForestModel {
            config: file.config,
            features: file.features,
            normalization: file.normalization,
            trees: file.trees,
        })
    }
}

fn check_tree(root: &TreeNode) -> Result<(), String> {
    let mut pending = vec![root];
    while let Some(node) = pending.pop() {
        match node {
            TreeNode::Leaf { counts } => {
                if counts.iter().all(|&c| c == 0) {
                    return Err("leaf with no samples".into());
                }
            }
            TreeNode::Internal { feature, threshold, left, right } => {
                if *feature >= FEATURE_COUNT {
                    return Err(format!("feature index {feature} out of range"));
                }
                if !threshold.is_finite() {
                    return Err("non-finite threshold".into());
                }
                pending.push(left);
                pending.push(right);
            }
        }
    }
    Ok(())
}
