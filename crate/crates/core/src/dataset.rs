//! Loaders for the public benchmark corpora and generic labelled directories.
//!
//! All loaders read files in sorted path order so corpus contents are
//! identical across platforms and runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::text::{RawCorpus, RawDocument, TrainSplit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Newsgroups20,
    Imdb,
    /// `root/<label>/<file>`, labels in sorted directory order.
    LabeledDirs,
}

#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    pub root: PathBuf,
    /// Newsgroup to super-category map; the default is used when `None`.
    pub grouping: Option<Grouping>,
}

/// A dataset as it comes off disk: either with a published train/test split
/// or as a single corpus to be split by a [`SplitPlan`](crate::split::SplitPlan).
#[derive(Debug, Clone)]
pub enum LoadedDataset {
    Presplit { train: TrainSplit, test: RawCorpus },
    Whole(RawCorpus),
}

pub fn load(spec: &DatasetSpec) -> Result<LoadedDataset> {
    match spec.kind {
        DatasetKind::Imdb => {
            let (train, test) = load_imdb(&spec.root)?;
            Ok(LoadedDataset::Presplit { train, test })
        }
        DatasetKind::Newsgroups20 => {
            let default;
            let grouping = match &spec.grouping {
                Some(g) => g,
                None => {
                    default = Grouping::default_newsgroups();
                    &default
                }
            };
            Ok(LoadedDataset::Whole(load_20newsgroups(&spec.root, grouping)?.corpus))
        }
        DatasetKind::LabeledDirs => Ok(LoadedDataset::Whole(load_labeled_dirs(&spec.root)?)),
    }
}

fn sorted_entries(dir: &Path, want_dirs: bool) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Error::MissingPath(dir.to_path_buf()));
    }
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let is_dir = path.is_dir();
        if is_dir == want_dirs && (is_dir || path.is_file()) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Reads every file in `dir` (sorted) as one document with `label`.
/// Invalid UTF-8 is replaced rather than rejected.
fn read_leaf(dir: &Path, label: usize) -> Result<Vec<RawDocument>> {
    let files = sorted_entries(dir, false)?;
    files
        .par_iter()
        .map(|path| {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            Ok(RawDocument::new(String::from_utf8_lossy(&bytes), label, path.display().to_string()))
        })
        .collect()
}

/// IMDb reviews in the published layout: `train/{neg,pos}` and
/// `test/{neg,pos}`. Label ordinals are `neg = 0`, `pos = 1`.
pub fn load_imdb(root: &Path) -> Result<(TrainSplit, RawCorpus)> {
    let labels = vec!["neg".to_string(), "pos".to_string()];
    let load_split = |split: &str| -> Result<RawCorpus> {
        let mut docs = Vec::new();
        for (ordinal, label) in labels.iter().enumerate() {
            docs.extend(read_leaf(&root.join(split).join(label), ordinal)?);
        }
        RawCorpus::new(docs, labels.clone())
    };
    let train = load_split("train")?;
    let test = load_split("test")?;
    Ok((TrainSplit::from_corpus(train), test))
}

/// Assignment of newsgroups to super-categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grouping {
    categories: Vec<String>,
    assignment: BTreeMap<String, usize>,
}

const DEFAULT_GROUPS: [(&str, &str); 16] = [
    ("comp.graphics", "computers"),
    ("comp.os.ms-windows.misc", "computers"),
    ("comp.sys.ibm.pc.hardware", "computers"),
    ("comp.sys.mac.hardware", "computers"),
    ("comp.windows.x", "computers"),
    ("rec.autos", "recreation"),
    ("rec.motorcycles", "recreation"),
    ("rec.sport.baseball", "recreation"),
    ("rec.sport.hockey", "recreation"),
    ("sci.crypt", "science"),
    ("sci.electronics", "science"),
    ("sci.med", "science"),
    ("sci.space", "science"),
    ("talk.politics.guns", "politics"),
    ("talk.politics.mideast", "politics"),
    ("talk.politics.misc", "politics"),
];

impl Grouping {
    /// Builds a grouping from `(newsgroup, category)` pairs. Categories are
    /// numbered in order of first appearance.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut categories: Vec<String> = Vec::new();
        let mut assignment = BTreeMap::new();
        for (group, category) in pairs {
            let ordinal = match categories.iter().position(|c| c == category) {
                Some(i) => i,
                None => {
                    categories.push(category.to_string());
                    categories.len() - 1
                }
            };
            if assignment.insert(group.to_string(), ordinal).is_some() {
                return Err(Error::Dataset(format!("newsgroup {group} assigned twice")));
            }
        }
        if assignment.is_empty() {
            return Err(Error::Dataset("grouping is empty".into()));
        }
        Ok(Self { categories, assignment })
    }

    /// comp.* to computers, rec.* to recreation, sci.* to science and
    /// talk.politics.* to politics.
    pub fn default_newsgroups() -> Self {
        Self::from_pairs(DEFAULT_GROUPS).expect("default grouping is valid")
    }

    /// Parses `newsgroup category` lines; blank lines and `#` comments are
    /// ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(g), Some(c), None) => pairs.push((g, c)),
                _ => return Err(Error::Dataset(format!("grouping line {}: expected `newsgroup category`", n + 1))),
            }
        }
        Self::from_pairs(pairs)
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn category_of(&self, newsgroup: &str) -> Option<usize> {
        self.assignment.get(newsgroup).copied()
    }

    pub fn newsgroups(&self) -> impl Iterator<Item = &str> {
        self.assignment.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone)]
pub struct NewsgroupsCorpus {
    pub corpus: RawCorpus,
    /// Documents in newsgroups outside the grouping.
    pub skipped: usize,
    /// Fewer than two categories ended up with documents.
    pub degenerate: bool,
}

/// 20 Newsgroups with one directory per newsgroup under `root`, message
/// headers left in place.
pub fn load_20newsgroups(root: &Path, grouping: &Grouping) -> Result<NewsgroupsCorpus> {
    let dirs = sorted_entries(root, true)?;
    let present: Vec<String> =
        dirs.iter().filter_map(|d| d.file_name().map(|n| n.to_string_lossy().into_owned())).collect();
    let missing: Vec<&str> = grouping.newsgroups().filter(|g| !present.iter().any(|p| p == g)).collect();
    if !missing.is_empty() {
        return Err(Error::Dataset(format!("grouping references absent newsgroups: {}", missing.join(", "))));
    }
    let mut docs = Vec::new();
    let mut skipped = 0;
    for (dir, name) in dirs.iter().zip(&present) {
        match grouping.category_of(name) {
            Some(category) => docs.extend(read_leaf(dir, category)?),
            None => skipped += sorted_entries(dir, false)?.len(),
        }
    }
    if docs.is_empty() {
        return Err(Error::Dataset(format!("no newsgroup documents under {}", root.display())));
    }
    let used: std::collections::BTreeSet<usize> = docs.iter().map(|d| d.label).collect();
    Ok(NewsgroupsCorpus {
        corpus: RawCorpus::new(docs, grouping.categories().to_vec())?,
        skipped,
        degenerate: used.len() < 2,
    })
}

/// One subdirectory per class, one file per document.
pub fn load_labeled_dirs(root: &Path) -> Result<RawCorpus> {
    let dirs = sorted_entries(root, true)?;
    if dirs.is_empty() {
        return Err(Error::Dataset(format!("no class directories under {}", root.display())));
    }
    let mut labels = Vec::new();
    let mut docs = Vec::new();
    for (ordinal, dir) in dirs.iter().enumerate() {
        labels.push(dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
        docs.extend(read_leaf(dir, ordinal)?);
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    RawCorpus::new(docs, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(path: &Path, text: &str) {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, text).unwrap();
    }

    fn mini_imdb(root: &Path) {
        for split in ["train", "test"] {
            for label in ["pos", "neg"] {
                for i in 0..2 {
                    write(&root.join(split).join(label).join(format!("{i}_7.txt")), &format!("{split} {label} {i}"));
                }
            }
        }
    }

    #[test]
    fn imdb_miniature_tree() {
        let dir = tempfile::tempdir().unwrap();
        mini_imdb(dir.path());
        let (train, test) = load_imdb(dir.path()).unwrap();
        assert_eq!(train.corpus().len(), 4);
        assert_eq!(test.len(), 4);
        assert_eq!(train.corpus().class_labels(), ["neg", "pos"]);
        assert_eq!(train.corpus().labels(), [0, 0, 1, 1]);
        assert_eq!(test.documents()[2].text, "test pos 0");
    }

    #[test]
    fn imdb_missing_leaf_names_path() {
        let dir = tempfile::tempdir().unwrap();
        mini_imdb(dir.path());
        fs::remove_dir_all(dir.path().join("test/pos")).unwrap();
        match load_imdb(dir.path()) {
            Err(Error::MissingPath(p)) => assert!(p.ends_with("test/pos")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn newsgroups_grouping() {
        let dir = tempfile::tempdir().unwrap();
        for g in ["comp.graphics", "rec.autos", "alt.atheism"] {
            for i in 0..3 {
                write(&dir.path().join(g).join(i.to_string()), &format!("{g} message {i}"));
            }
        }
        let grouping = Grouping::from_pairs([("comp.graphics", "computers"), ("rec.autos", "recreation")]).unwrap();
        let ng = load_20newsgroups(dir.path(), &grouping).unwrap();
        assert_eq!(ng.corpus.len(), 6);
        assert_eq!(ng.skipped, 3);
        assert!(!ng.degenerate);
        assert_eq!(ng.corpus.labels(), [0, 0, 0, 1, 1, 1]);

        let single = Grouping::from_pairs([("rec.autos", "recreation")]).unwrap();
        let ng = load_20newsgroups(dir.path(), &single).unwrap();
        assert!(ng.degenerate);
        assert_eq!(ng.corpus.class_labels(), ["recreation"]);

        assert!(load_20newsgroups(dir.path(), &Grouping::default_newsgroups()).is_err());
    }

    #[test]
    fn newsgroups_empty_root() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_20newsgroups(dir.path(), &Grouping::from_pairs([("a", "b")]).unwrap()).is_err());
        assert!(load_20newsgroups(&dir.path().join("nope"), &Grouping::default_newsgroups()).is_err());
    }

    #[test]
    fn default_grouping_has_four_categories_over_sixteen_groups() {
        let g = Grouping::default_newsgroups();
        assert_eq!(g.categories(), ["computers", "recreation", "science", "politics"]);
        assert_eq!(g.newsgroups().count(), 16);
        assert_eq!(g.category_of("talk.politics.guns"), Some(3));
        assert_eq!(g.category_of("talk.religion.misc"), None);
    }

    #[test]
    fn grouping_parse() {
        let g = Grouping::parse("# comment\nsci.med science\n\ncomp.graphics computers\n").unwrap();
        assert_eq!(g.categories(), ["science", "computers"]);
        assert!(Grouping::parse("sci.med").is_err());
        assert!(Grouping::parse("a x\na y").is_err());
    }

    #[test]
    fn labeled_dirs() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("spam/b.txt"), "buy now");
        write(&dir.path().join("spam/a.txt"), "cheap");
        write(&dir.path().join("ham/x.txt"), "hello");
        let c = load_labeled_dirs(dir.path()).unwrap();
        assert_eq!(c.class_labels(), ["ham", "spam"]);
        assert_eq!(c.documents()[1].text, "cheap");
        assert_eq!(c.labels(), [0, 1, 1]);
    }
}
