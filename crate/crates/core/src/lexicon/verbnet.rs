//! VerbNet class files (`VNCLASS` XML, one class tree per file).

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use crate::error::{Error, Result};

fn class_grammar() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[a-z_]+-[0-9.]+(-[0-9]+)*$").unwrap())
}

/// True if `s` looks like a VerbNet class id such as `contribute-13.2-2`.
pub fn is_class_id(s: &str) -> bool {
    class_grammar().is_match(s)
}

#[derive(Clone, Debug, Default)]
pub struct VerbNetIndex {
    /// Lemma -> classes that list it directly, ordered.
    by_lemma: BTreeMap<String, BTreeSet<String>>,
    /// Class -> its direct members.
    members: BTreeMap<String, Vec<String>>,
}

impl VerbNetIndex {
    /// Loads every `*.xml` file in `path` (or the single file `path`).
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut files = Vec::new();
        if path.is_dir() {
            let entries = fs::read_dir(path).map_err(|e| Error::load(path, e.to_string()))?;
            for entry in entries {
                let p = entry?.path();
                if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("xml")) {
                    files.push(p);
                }
            }
            files.sort();
            if files.is_empty() {
                return Err(Error::load(path, "no VerbNet class files found"));
            }
        } else {
            files.push(path.to_path_buf());
        }
        let mut index = VerbNetIndex::default();
        for file in &files {
            let text = fs::read_to_string(file).map_err(|e| Error::load(file, e.to_string()))?;
            index
                .add_xml(&text)
                .map_err(|msg| Error::load(file, msg))?;
        }
        Ok(index)
    }

    /// Parses one class file into the index.
    pub fn add_xml(&mut self, text: &str) -> std::result::Result<(), String> {
        let opts = roxmltree::ParsingOptions {
            allow_dtd: true,
            ..Default::default()
        };
        let doc = roxmltree::Document::parse_with_options(text, opts).map_err(|e| e.to_string())?;
        let root = doc.root_element();
        if root.tag_name().name() != "VNCLASS" {
            return Err(format!("root element is <{}>, not <VNCLASS>", root.tag_name().name()));
        }
        for class in root
            .descendants()
            .filter(|n| matches!(n.tag_name().name(), "VNCLASS" | "VNSUBCLASS"))
        {
            let id = class
                .attribute("ID")
                .ok_or_else(|| "class element without ID".to_string())?;
            if !is_class_id(id) {
                return Err(format!("malformed class id {id:?}"));
            }
            let names: Vec<String> = class
                .children()
                .filter(|n| n.has_tag_name("MEMBERS"))
                .flat_map(|m| m.children().filter(|n| n.has_tag_name("MEMBER")))
                .filter_map(|m| m.attribute("name"))
                .map(|name| name.trim().to_lowercase().replace(' ', "_"))
                .collect();
            for name in &names {
                self.by_lemma
                    .entry(name.clone())
                    .or_default()
                    .insert(id.to_string());
            }
            self.members.entry(id.to_string()).or_default().extend(names);
        }
        Ok(())
    }

    /// Class for a verb lemma. A lemma listed in several classes maps to
    /// the lexicographically smallest class id.
    pub fn verb_class(&self, lemma: &str) -> Option<&str> {
        let key = lemma.trim().to_lowercase().replace(' ', "_");
        self.by_lemma
            .get(&key)
            .and_then(|set| set.iter().next())
            .map(String::as_str)
    }

    /// Direct members of a class, in file order.
    pub fn members(&self, class: &str) -> &[String] {
        self.members.get(class).map_or(&[], Vec::as_slice)
    }

    pub fn class_count(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XML: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<!DOCTYPE VNCLASS SYSTEM "vn_class-3.dtd">
<VNCLASS ID="contribute-13.2">
  <MEMBERS><MEMBER name="donate"/><MEMBER name="contribute"/></MEMBERS>
  <SUBCLASSES>
    <VNSUBCLASS ID="contribute-13.2-2">
      <MEMBERS><MEMBER name="forward"/><MEMBER name="transfer"/></MEMBERS>
      <SUBCLASSES/>
    </VNSUBCLASS>
  </SUBCLASSES>
</VNCLASS>"#;

    #[test]
    fn subclass_members_map_to_subclass() {
        let mut vn = VerbNetIndex::default();
        vn.add_xml(XML).unwrap();
        assert_eq!(vn.verb_class("transfer"), Some("contribute-13.2-2"));
        assert_eq!(vn.verb_class("Donate"), Some("contribute-13.2"));
        assert_eq!(vn.verb_class("walk"), None);
        assert_eq!(vn.members("contribute-13.2").len(), 2);
        assert_eq!(vn.class_count(), 2);
    }

    #[test]
    fn ambiguous_lemma_takes_smallest_class() {
        let mut vn = VerbNetIndex::default();
        vn.add_xml(r#"<VNCLASS ID="steal-10.5"><MEMBERS><MEMBER name="steal"/></MEMBERS></VNCLASS>"#)
            .unwrap();
        vn.add_xml(r#"<VNCLASS ID="get-13.5.1"><MEMBERS><MEMBER name="steal"/></MEMBERS></VNCLASS>"#)
            .unwrap();
        assert_eq!(vn.verb_class("steal"), Some("get-13.5.1"));
    }

    #[test]
    fn class_id_grammar() {
        assert!(is_class_id("escape-51.1"));
        assert!(is_class_id("contribute-13.2-2"));
        assert!(is_class_id("spatial_configuration-47.6"));
        assert!(!is_class_id("car.n.01"));
        assert!(!is_class_id("Escape-51"));
    }

    #[test]
    fn malformed_xml_is_rejected() {
        let mut vn = VerbNetIndex::default();
        assert!(vn.add_xml("<VNCLASS ID=\"x-1\">").is_err());
        assert!(vn.add_xml("<FOO/>").is_err());
        assert!(vn.add_xml("<VNCLASS ID=\"BAD\"/>").is_err());
    }
}
