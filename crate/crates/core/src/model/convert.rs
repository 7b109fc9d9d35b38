//! Converter from the spreadsheet (CSV) layout of the published debate corpus
//! into canonical [`Debate`] values.
//!
//! One CSV file holds one debate, one row per ADU. A row may point at
//! several related ADUs (`RELATED_ID`, separated by `;` or `,`) with a
//! matching list of relation types. Relation types accept both the AIF
//! scheme names (`RA`, `CA`, `MA`) and plain words.
//!
//! Problems the canonical loader would reject (dangling references,
//! self-relations, blank texts) are dropped and listed in the
//! [`ConversionReport`]. Inference and rephrase relations that cross stances
//! are kept and listed so that callers can decide what to do with them.

use std::collections::{HashMap, HashSet};
use std::io::Read;

use serde::Serialize;

use super::{Adu, Debate, Phase, Relation, RelationKind, Stance};
use crate::error::{Error, Result};

/// Column names of the spreadsheet layout.
#[derive(Debug, Clone)]
pub struct CsvLayout {
    pub id: String,
    pub text: String,
    pub stance: String,
    pub phase: String,
    pub related: String,
    pub relation_type: String,
    pub delimiter: u8,
}

impl Default for CsvLayout {
    fn default() -> Self {
        CsvLayout {
            id: "ID".into(),
            text: "ADU_CAT".into(),
            stance: "STANCE".into(),
            phase: "PHASE".into(),
            related: "RELATED_ID".into(),
            relation_type: "ARGUMENT_RELATION_TYPE".into(),
            delimiter: b',',
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ConversionReport {
    pub rows: usize,
    pub dropped_blank_adus: Vec<String>,
    pub dropped_duplicate_adus: Vec<String>,
    pub dropped_dangling: Vec<(String, String)>,
    pub dropped_self_relations: Vec<String>,
    /// Inference/rephrase relations between ADUs of different stance (kept).
    pub cross_stance: Vec<(String, String, RelationKind)>,
}

impl ConversionReport {
    pub fn is_clean(&self) -> bool {
        self.dropped_blank_adus.is_empty()
            && self.dropped_duplicate_adus.is_empty()
            && self.dropped_dangling.is_empty()
            && self.dropped_self_relations.is_empty()
            && self.cross_stance.is_empty()
    }
}

pub fn parse_stance_label(label: &str) -> Option<Stance> {
    let l = label.trim().to_ascii_uppercase();
    match l.as_str() {
        "F" | "FAVOUR" | "FAVOR" | "IN FAVOUR" | "IN FAVOR" | "PRO" | "A FAVOR" => {
            Some(Stance::Favour)
        }
        "A" | "AGAINST" | "CON" | "EN CONTRA" | "CONTRA" => Some(Stance::Against),
        _ => None,
    }
}

pub fn parse_phase_label(label: &str) -> Option<Phase> {
    let l = label.trim().to_ascii_uppercase();
    if l.starts_with("INTRO") {
        Some(Phase::Introduction)
    } else if l.starts_with("ARG") {
        Some(Phase::Argumentation)
    } else if l.starts_with("CONC") {
        Some(Phase::Conclusion)
    } else {
        None
    }
}

pub fn parse_relation_label(label: &str) -> Option<RelationKind> {
    match label.trim().to_ascii_uppercase().as_str() {
        "RA" | "INFERENCE" | "SUPPORT" => Some(RelationKind::Inference),
        "CA" | "CONFLICT" | "ATTACK" => Some(RelationKind::Conflict),
        "MA" | "REPHRASE" => Some(RelationKind::Rephrase),
        _ => None,
    }
}

fn split_list(cell: &str) -> Vec<&str> {
    cell.split([';', ','])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

/// Converts one spreadsheet into a debate with the given id and jury winner.
pub fn from_csv<R: Read>(
    reader: R,
    debate_id: &str,
    winner: Stance,
    layout: &CsvLayout,
) -> Result<(Debate, ConversionReport)> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(layout.delimiter)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    let column = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Parse(format!("missing column {name:?}")))
    };
    let c_id = column(&layout.id)?;
    let c_text = column(&layout.text)?;
    let c_stance = column(&layout.stance)?;
    let c_phase = column(&layout.phase)?;
    let c_related = column(&layout.related)?;
    let c_type = column(&layout.relation_type)?;

    let mut report = ConversionReport::default();
    let mut adus = Vec::new();
    let mut seen = HashSet::new();
    let mut pending = Vec::new();

    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        report.rows += 1;
        let get = |c: usize| record.get(c).unwrap_or("").trim();
        let id = get(c_id).to_string();
        if id.is_empty() {
            continue;
        }
        let text = get(c_text).to_string();
        if text.is_empty() {
            report.dropped_blank_adus.push(id);
            continue;
        }
        let stance = parse_stance_label(get(c_stance)).ok_or_else(|| {
            Error::Validation(format!("row {}: bad stance {:?}", line + 2, get(c_stance)))
        })?;
        let phase = parse_phase_label(get(c_phase)).ok_or_else(|| {
            Error::Validation(format!("row {}: bad phase {:?}", line + 2, get(c_phase)))
        })?;
        if !seen.insert(id.clone()) {
            report.dropped_duplicate_adus.push(id);
            continue;
        }
        let targets = split_list(get(c_related));
        let kinds = split_list(get(c_type));
        for (i, target) in targets.iter().enumerate() {
            // A single type applies to every listed target.
            let label = kinds
                .get(i)
                .or_else(|| kinds.first())
                .copied()
                .unwrap_or("");
            let kind = parse_relation_label(label).ok_or_else(|| {
                Error::Validation(format!("row {}: bad relation type {label:?}", line + 2))
            })?;
            pending.push(Relation {
                source: id.clone(),
                target: target.to_string(),
                kind,
            });
        }
        adus.push(Adu {
            id,
            text,
            stance,
            phase,
        });
    }

    let stances: HashMap<&str, Stance> = adus.iter().map(|a| (a.id.as_str(), a.stance)).collect();
    let mut relations = Vec::with_capacity(pending.len());
    for rel in pending {
        if rel.source == rel.target {
            report.dropped_self_relations.push(rel.source);
            continue;
        }
        let (Some(&s), Some(&t)) = (
            stances.get(rel.source.as_str()),
            stances.get(rel.target.as_str()),
        ) else {
            report.dropped_dangling.push((rel.source, rel.target));
            continue;
        };
        if rel.kind != RelationKind::Conflict && s != t {
            report
                .cross_stance
                .push((rel.source.clone(), rel.target.clone(), rel.kind));
        }
        relations.push(rel);
    }

    let debate = Debate {
        id: debate_id.to_string(),
        winner,
        adus,
        relations,
    };
    debate.validate()?;
    Ok((debate, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHEET: &str = "\
ID,PHASE,ADU_CAT,STANCE,RELATED_ID,ARGUMENT_RELATION_TYPE
1,INTRO,Primer argument,FAVOUR,2,RA
2,ARGUMENTATION,Segon argument,FAVOUR,,
3,ARGUMENTATION,Rebuig,AGAINST,1;2,CA;CA
4,CONCLUSION,Reformulacio,AGAINST,1,MA
5,CONCLUSION,,AGAINST,,
6,CONCLUSION,Referencia perduda,AGAINST,99,RA
7,CONCLUSION,Autoreferencia,AGAINST,7,RA
";

    #[test]
    fn converts_and_reports_anomalies() {
        let (debate, report) = from_csv(
            SHEET.as_bytes(),
            "d1",
            Stance::Favour,
            &CsvLayout::default(),
        )
        .unwrap();
        assert_eq!(debate.adus.len(), 6);
        assert_eq!(debate.relations.len(), 4);
        assert_eq!(report.rows, 7);
        assert_eq!(report.dropped_blank_adus, vec!["5".to_string()]);
        assert_eq!(
            report.dropped_dangling,
            vec![("6".to_string(), "99".to_string())]
        );
        assert_eq!(report.dropped_self_relations, vec!["7".to_string()]);
        assert_eq!(
            report.cross_stance,
            vec![("4".to_string(), "1".to_string(), RelationKind::Rephrase)]
        );
        assert_eq!(debate.adu("1").unwrap().phase, Phase::Introduction);
        assert_eq!(debate.adu("3").unwrap().stance, Stance::Against);
    }

    #[test]
    fn missing_column_is_a_parse_error() {
        let err = from_csv(
            "ID,TEXT\n1,x\n".as_bytes(),
            "d",
            Stance::Favour,
            &CsvLayout::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }
}
