use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const THEME_MANIFEST: &str = include_str!("../../data/gkg_themes.v1.txt");
const CAMEO_MANIFEST: &str = include_str!("../../data/cameo_base_codes.v1.txt");

pub const THEME_COUNT: usize = 283;
pub const CAMEO_COUNT: usize = 148;
pub const FEATURE_COUNT: usize = 2 * THEME_COUNT + 2 * CAMEO_COUNT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureGroup {
    ThemeCount,
    ThemeSentiment,
    CameoCount,
    CameoSentiment,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 4] = [
        FeatureGroup::ThemeCount,
        FeatureGroup::ThemeSentiment,
        FeatureGroup::CameoCount,
        FeatureGroup::CameoSentiment,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureGroup::ThemeCount => "theme_count",
            FeatureGroup::ThemeSentiment => "theme_sentiment",
            FeatureGroup::CameoCount => "cameo_count",
            FeatureGroup::CameoSentiment => "cameo_sentiment",
        }
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureGroup::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown feature group `{s}`")))
    }
}

/// Identity of one feature column: a group and a theme name or CAMEO code.
/// Serialized as `group:key`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureId {
    pub group: FeatureGroup,
    pub key: String,
}

impl FeatureId {
    pub fn new(group: FeatureGroup, key: impl Into<String>) -> Self {
        FeatureId { group, key: key.into() }
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.group, self.key)
    }
}

impl FromStr for FeatureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (group, key) =
            s.split_once(':').ok_or_else(|| Error::invalid(format!("feature id `{s}` lacks a group prefix")))?;
        if key.is_empty() {
            return Err(Error::invalid(format!("feature id `{s}` has an empty key")));
        }
        Ok(FeatureId::new(group.parse()?, key))
    }
}

/// The canonical theme and CAMEO base-code lists. Column order of a real-format
/// dataset is: theme counts, theme sentiments, CAMEO counts, CAMEO sentiments,
/// each in manifest order.
#[derive(Debug, Clone)]
pub struct Registry {
    themes: Vec<String>,
    cameo: Vec<String>,
    theme_index: HashMap<String, usize>,
    cameo_index: HashMap<String, usize>,
}

fn manifest_keys(text: &str) -> Vec<String> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_owned).collect()
}

impl Registry {
    pub fn canonical() -> Self {
        Registry::from_keys(manifest_keys(THEME_MANIFEST), manifest_keys(CAMEO_MANIFEST))
    }

    pub fn from_keys(themes: Vec<String>, cameo: Vec<String>) -> Self {
        let theme_index = themes.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        let cameo_index = cameo.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        Registry { themes, cameo, theme_index, cameo_index }
    }

    pub fn themes(&self) -> &[String] {
        &self.themes
    }

    pub fn cameo_codes(&self) -> &[String] {
        &self.cameo
    }

    pub fn theme_slot(&self, theme: &str) -> Option<usize> {
        self.theme_index.get(theme).copied()
    }

    pub fn cameo_slot(&self, code: &str) -> Option<usize> {
        self.cameo_index.get(code).copied()
    }

    pub fn feature_count(&self) -> usize {
        2 * self.themes.len() + 2 * self.cameo.len()
    }

    pub fn feature_ids(&self) -> Vec<FeatureId> {
        let mut ids = Vec::with_capacity(self.feature_count());
        for (group, keys) in [
            (FeatureGroup::ThemeCount, &self.themes),
            (FeatureGroup::ThemeSentiment, &self.themes),
            (FeatureGroup::CameoCount, &self.cameo),
            (FeatureGroup::CameoSentiment, &self.cameo),
        ] {
            ids.extend(keys.iter().map(|k| FeatureId::new(group, k.clone())));
        }
        ids
    }

    /// Column offsets of the four groups.
    pub(crate) fn offsets(&self) -> [usize; 4] {
        let t = self.themes.len();
        let c = self.cameo.len();
        [0, t, 2 * t, 2 * t + c]
    }
}
