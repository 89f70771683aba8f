//! Reading annotated corpora, gold-label mapping, attention normalization and
//! a lexicon annotator for EDUs that arrive without scores.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{Document, Edu};

/// Gold label, either a star rating on an integer scale or a polarity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "GoldFields")]
pub enum GoldLabel {
    Stars { stars: i64, scale: (i64, i64) },
    Polarity { polarity: f64 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GoldFields {
    stars: Option<i64>,
    scale: Option<(i64, i64)>,
    polarity: Option<f64>,
}

impl TryFrom<GoldFields> for GoldLabel {
    type Error = String;

    fn try_from(g: GoldFields) -> Result<Self, Self::Error> {
        match (g.stars, g.scale, g.polarity) {
            (Some(stars), Some(scale), None) => Ok(GoldLabel::Stars { stars, scale }),
            (None, None, Some(polarity)) => Ok(GoldLabel::Polarity { polarity }),
            _ => Err("gold needs either {stars, scale} or {polarity}".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEdu {
    #[serde(default)]
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attention: Option<f64>,
}

/// One input line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocumentRecord {
    pub doc_id: String,
    pub gold: GoldLabel,
    pub edus: Vec<RawEdu>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("{stars} stars outside scale {lo}..={hi}")]
    OutOfRange { stars: i64, lo: i64, hi: i64 },
    #[error("{0}")]
    InvalidRange(String),
    #[error("EDU {index} has no {field} and no lexicon is configured")]
    MissingScores { index: usize, field: &'static str },
    #[error("document has no EDUs")]
    EmptyDocument,
}

/// Linear map of a star rating onto `[-1, 1]`.
pub fn stars_to_polarity(stars: i64, scale: (i64, i64)) -> Result<f64, IngestError> {
    let (lo, hi) = scale;
    if lo >= hi {
        return Err(IngestError::InvalidRange(format!("star scale {lo}..={hi} is empty")));
    }
    if stars < lo || stars > hi {
        return Err(IngestError::OutOfRange { stars, lo, hi });
    }
    let mid = (lo + hi) as f64 / 2.0;
    let half = (hi - lo) as f64 / 2.0;
    Ok((stars as f64 - mid) / half)
}

/// Token polarities for the stand-in annotator.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SentimentLexicon {
    entries: HashMap<String, f64>,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("lexicon line {line}: {message}")]
    Line { line: usize, message: String },
}

impl SentimentLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `token` (normalized like text tokens) with a polarity in `[-1, 1]`.
    pub fn insert(&mut self, token: &str, polarity: f64) -> Result<(), IngestError> {
        if !(-1.0..=1.0).contains(&polarity) {
            return Err(IngestError::InvalidRange(format!(
                "lexicon polarity {polarity} for '{token}' outside [-1, 1]"
            )));
        }
        let key = normalize_token(token);
        if key.is_empty() {
            return Err(IngestError::InvalidRange(format!(
                "lexicon token '{token}' is empty after normalization"
            )));
        }
        self.entries.insert(key, polarity);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Reads `token<TAB>polarity` lines; blank lines and `#` comments are skipped.
    pub fn read<R: BufRead>(input: R) -> Result<Self, LexiconError> {
        let mut lex = SentimentLexicon::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| LexiconError::Line { line: i + 1, message };
            let (token, value) = line
                .split_once('\t')
                .ok_or_else(|| err("expected token<TAB>polarity".into()))?;
            let polarity: f64 = value
                .trim()
                .parse()
                .map_err(|_| err(format!("invalid polarity '{}'", value.trim())))?;
            lex.insert(token.trim(), polarity).map_err(|e| err(e.to_string()))?;
        }
        Ok(lex)
    }
}

impl<'a> FromIterator<(&'a str, f64)> for SentimentLexicon {
    /// Panics on out-of-range polarities; meant for literals in code.
    fn from_iter<I: IntoIterator<Item = (&'a str, f64)>>(iter: I) -> Self {
        let mut lex = SentimentLexicon::new();
        for (token, polarity) in iter {
            lex.insert(token, polarity).expect("lexicon literal out of range");
        }
        lex
    }
}

fn normalize_token(raw: &str) -> String {
    raw.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase()
}

/// Whitespace split, surrounding punctuation stripped, lowercased.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split_whitespace().map(normalize_token).filter(|t| !t.is_empty())
}

/// `(mean polarity of matched tokens, 1 + matches)`; sentiment is `0.0`
/// when nothing matches.
pub fn lexicon_annotate(edu_text: &str, lexicon: &SentimentLexicon) -> (f64, f64) {
    let (sum, hits) = tokenize(edu_text)
        .filter_map(|t| lexicon.get(&t))
        .fold((0.0, 0usize), |(s, k), p| (s + p, k + 1));
    let sentiment = if hits == 0 { 0.0 } else { sum / hits as f64 };
    (sentiment, 1.0 + hits as f64)
}

/// Attentions within this distance of summing to one are left untouched.
const NORMALIZED_TOLERANCE: f64 = 1e-12;

/// Turns a raw record into a checked [`Document`].
///
/// Missing EDU scores come from the lexicon, star ratings become polarities
/// and attentions are rescaled to sum to one over the document.
pub fn normalize_document(
    record: &RawDocumentRecord,
    lexicon: Option<&SentimentLexicon>,
) -> Result<Document, IngestError> {
    if record.edus.is_empty() {
        return Err(IngestError::EmptyDocument);
    }
    if record.doc_id.is_empty() {
        return Err(IngestError::InvalidRange("doc_id is empty".into()));
    }
    let gold_polarity = match record.gold {
        GoldLabel::Stars { stars, scale } => stars_to_polarity(stars, scale)?,
        GoldLabel::Polarity { polarity } => {
            if !(-1.0..=1.0).contains(&polarity) {
                return Err(IngestError::InvalidRange(format!(
                    "gold polarity {polarity} outside [-1, 1]"
                )));
            }
            polarity
        }
    };

    let mut sentiments = Vec::with_capacity(record.edus.len());
    let mut weights = Vec::with_capacity(record.edus.len());
    for (i, edu) in record.edus.iter().enumerate() {
        let index = i + 1;
        let annotated = match (edu.sentiment, edu.attention, lexicon) {
            (Some(_), Some(_), _) => None,
            (_, _, Some(lex)) => Some(lexicon_annotate(&edu.text, lex)),
            (None, _, None) => {
                return Err(IngestError::MissingScores {
                    index,
                    field: "sentiment",
                })
            }
            (_, None, None) => {
                return Err(IngestError::MissingScores {
                    index,
                    field: "attention",
                })
            }
        };
        let sentiment = match edu.sentiment {
            Some(s) => s,
            None => annotated.map(|a| a.0).unwrap_or_default(),
        };
        let weight = match edu.attention {
            Some(a) => a,
            None => annotated.map(|a| a.1).unwrap_or_default(),
        };
        if !(-1.0..=1.0).contains(&sentiment) {
            return Err(IngestError::InvalidRange(format!(
                "EDU {index}: sentiment {sentiment} outside [-1, 1]"
            )));
        }
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(IngestError::InvalidRange(format!(
                "EDU {index}: attention {weight} is not a positive finite number"
            )));
        }
        sentiments.push(sentiment);
        weights.push(weight);
    }

    let total: f64 = weights.iter().sum();
    if !total.is_finite() {
        return Err(IngestError::InvalidRange("attention total overflows".into()));
    }
    if (total - 1.0).abs() > NORMALIZED_TOLERANCE {
        for w in &mut weights {
            *w /= total;
        }
    }

    let edus = record
        .edus
        .iter()
        .zip(sentiments.into_iter().zip(weights))
        .enumerate()
        .map(|(i, (raw, (sentiment, attention)))| Edu {
            index: i + 1,
            text: raw.text.clone(),
            sentiment,
            attention,
        })
        .collect();
    Document::new(record.doc_id.clone(), gold_polarity, edus).map_err(|e| IngestError::InvalidRange(e.to_string()))
}

/// Raw record carrying every score of `doc` explicitly.
pub fn document_to_record(doc: &Document) -> RawDocumentRecord {
    RawDocumentRecord {
        doc_id: doc.doc_id.clone(),
        gold: GoldLabel::Polarity {
            polarity: doc.gold_polarity,
        },
        edus: doc
            .edus
            .iter()
            .map(|e| RawEdu {
                text: e.text.clone(),
                sentiment: Some(e.sentiment),
                attention: Some(e.attention),
            })
            .collect(),
    }
}

/// Per-line outcome of reading a record file.
#[derive(Debug)]
pub struct RecordLine {
    pub line: usize,
    pub record: Result<RawDocumentRecord, String>,
}

/// Reads newline-delimited records, keeping malformed lines as errors.
/// Blank lines are skipped.
pub fn read_records<R: BufRead>(input: R) -> io::Result<Vec<RecordLine>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(RecordLine {
            line: i + 1,
            record: serde_json::from_str(&line).map_err(|e| e.to_string()),
        });
    }
    Ok(out)
}

pub fn write_records<'a, W: Write>(
    out: &mut W,
    records: impl IntoIterator<Item = &'a RawDocumentRecord>,
) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> SentimentLexicon {
        [("great", 0.8), ("awful", -0.9)].into_iter().collect()
    }

    #[test]
    fn stars_examples() {
        assert_eq!(stars_to_polarity(3, (1, 5)), Ok(0.0));
        assert_eq!(stars_to_polarity(5, (1, 5)), Ok(1.0));
        assert_eq!(stars_to_polarity(1, (1, 5)), Ok(-1.0));
        assert_eq!(stars_to_polarity(4, (1, 5)), Ok(0.5));
        assert_eq!(
            stars_to_polarity(6, (1, 5)),
            Err(IngestError::OutOfRange { stars: 6, lo: 1, hi: 5 })
        );
        assert!(matches!(
            stars_to_polarity(1, (1, 1)),
            Err(IngestError::InvalidRange(_))
        ));
    }

    #[test]
    fn annotate_examples() {
        let l = lex();
        assert_eq!(lexicon_annotate("great food", &l), (0.8, 2.0));
        assert_eq!(lexicon_annotate("", &l), (0.0, 1.0));
        let (s, w) = lexicon_annotate("great but awful service", &l);
        assert!((s + 0.05).abs() < 1e-15);
        assert_eq!(w, 3.0);
    }

    #[test]
    fn tokenizer_strips_punctuation_and_case() {
        let toks: Vec<String> = tokenize("  \"Great!\" food... -- AWFUL,").collect();
        assert_eq!(toks, vec!["great", "food", "awful"]);
        assert_eq!(lexicon_annotate("GREAT!!!", &lex()), (0.8, 2.0));
    }

    #[test]
    fn lexicon_file_format() {
        let text = "# demo\ngreat\t0.8\n\nAwful\t-0.9\n";
        let l = SentimentLexicon::read(text.as_bytes()).unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l.get("awful"), Some(-0.9));
        for bad in ["great 0.8\n", "great\tx\n", "great\t1.5\n"] {
            match SentimentLexicon::read(bad.as_bytes()) {
                Err(LexiconError::Line { line: 1, .. }) => {}
                other => panic!("{bad:?}: {other:?}"),
            }
        }
    }

    fn scored(s: f64, a: f64) -> RawEdu {
        RawEdu {
            text: String::new(),
            sentiment: Some(s),
            attention: Some(a),
        }
    }

    #[test]
    fn normalization_halves_attention_summing_to_two() {
        let rec = RawDocumentRecord {
            doc_id: "d".into(),
            gold: GoldLabel::Stars {
                stars: 5,
                scale: (1, 5),
            },
            edus: vec![scored(0.1, 1.5), scored(-0.3, 0.5)],
        };
        let doc = normalize_document(&rec, None).unwrap();
        assert_eq!(doc.gold_polarity, 1.0);
        assert_eq!(doc.edus[0].attention, 0.75);
        assert_eq!(doc.edus[1].attention, 0.25);
    }

    #[test]
    fn text_only_edus_use_the_lexicon() {
        let l = lex();
        let texts = ["great food", "", "great but awful service"];
        let rec = RawDocumentRecord {
            doc_id: "d".into(),
            gold: GoldLabel::Polarity { polarity: 0.5 },
            edus: texts
                .iter()
                .map(|t| RawEdu {
                    text: t.to_string(),
                    ..Default::default()
                })
                .collect(),
        };
        let doc = normalize_document(&rec, Some(&l)).unwrap();
        for (edu, t) in doc.edus.iter().zip(texts) {
            let (s, w) = lexicon_annotate(t, &l);
            assert_eq!(edu.sentiment, s);
            assert!((edu.attention - w / 6.0).abs() < 1e-15);
            assert_eq!(edu.text, t);
        }
    }

    #[test]
    fn normalization_errors() {
        let text_only = RawDocumentRecord {
            doc_id: "d".into(),
            gold: GoldLabel::Polarity { polarity: 0.0 },
            edus: vec![RawEdu {
                text: "x".into(),
                ..Default::default()
            }],
        };
        assert_eq!(
            normalize_document(&text_only, None),
            Err(IngestError::MissingScores {
                index: 1,
                field: "sentiment"
            })
        );
        let mut rec = text_only.clone();
        rec.edus.clear();
        assert_eq!(normalize_document(&rec, None), Err(IngestError::EmptyDocument));
        let mut rec = text_only.clone();
        rec.edus = vec![scored(1.2, 1.0)];
        assert!(matches!(
            normalize_document(&rec, None),
            Err(IngestError::InvalidRange(_))
        ));
        rec.edus = vec![scored(0.2, 0.0)];
        assert!(matches!(
            normalize_document(&rec, None),
            Err(IngestError::InvalidRange(_))
        ));
        rec.edus = vec![scored(0.2, 1.0)];
        rec.gold = GoldLabel::Polarity { polarity: -1.5 };
        assert!(matches!(
            normalize_document(&rec, None),
            Err(IngestError::InvalidRange(_))
        ));
        rec.gold = GoldLabel::Stars {
            stars: 0,
            scale: (1, 5),
        };
        assert!(matches!(
            normalize_document(&rec, None),
            Err(IngestError::OutOfRange { .. })
        ));
    }

    #[test]
    fn record_json_schema() {
        let line = r#"{"doc_id":"r1","gold":{"stars":4,"scale":[1,5]},"edus":[{"text":"good","sentiment":0.5,"attention":0.2},{"text":"meh"}]}"#;
        let rec: RawDocumentRecord = serde_json::from_str(line).unwrap();
        assert_eq!(
            rec.gold,
            GoldLabel::Stars {
                stars: 4,
                scale: (1, 5)
            }
        );
        assert_eq!(rec.edus[1].sentiment, None);
        let polarity = r#"{"doc_id":"r2","gold":{"polarity":-0.25},"edus":[{"text":""}]}"#;
        let rec: RawDocumentRecord = serde_json::from_str(polarity).unwrap();
        assert_eq!(rec.gold, GoldLabel::Polarity { polarity: -0.25 });
        // both gold forms at once
        let both = r#"{"doc_id":"r3","gold":{"polarity":0.1,"stars":4,"scale":[1,5]},"edus":[{"text":""}]}"#;
        assert!(serde_json::from_str::<RawDocumentRecord>(both).is_err());
    }

    #[test]
    fn read_records_keeps_bad_lines() {
        let text = "{\"doc_id\":\"a\",\"gold\":{\"polarity\":0.1},\"edus\":[{\"text\":\"\"}]}\n\nnot json\n";
        let lines = read_records(text.as_bytes()).unwrap();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].record.is_ok());
        assert_eq!(lines[1].line, 3);
        assert!(lines[1].record.is_err());
    }
}
