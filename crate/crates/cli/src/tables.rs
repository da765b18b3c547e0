//! Flat CSV views of reports. Rank tables round-trip exactly; condition
//! reports flatten to one row of verdicts per prime.

use anyhow::{bail, Context, Result};
use buildings_core::conditions::Verdict;
use buildings_core::ranks::{EntryProvenance, RankEntry, RankTable, RankVariant};
use buildings_core::{ConditionReport, RingId};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRow {
    pub ring: RingId,
    pub p: String,
    pub q: usize,
    pub index: usize,
    pub variant: RankVariant,
    pub n: usize,
    pub value: String,
    pub cosets: String,
    pub orbits: String,
    pub oracle: Option<String>,
    pub lower_bound: String,
    pub provenance: EntryProvenance,
    /// Agreeing variants joined by `;`.
    pub agreeing: String,
}

pub fn rank_rows(t: &RankTable) -> Vec<RankRow> {
    t.entries
        .iter()
        .map(|e| RankRow {
            ring: t.ring,
            p: t.p.clone(),
            q: t.q,
            index: t.cosets,
            variant: t.variant,
            n: e.n,
            value: e.value.clone(),
            cosets: e.cosets.clone(),
            orbits: e.orbits.clone(),
            oracle: e.oracle.clone(),
            lower_bound: e.lower_bound.clone(),
            provenance: e.provenance,
            agreeing: e.agreeing.iter().map(|v| v.name()).collect::<Vec<_>>().join(";"),
        })
        .collect()
}

/// Rebuild a table from its rows; all rows must describe the same field.
pub fn rank_table_from_rows(rows: &[RankRow]) -> Result<RankTable> {
    let Some(first) = rows.first() else {
        bail!("no rows");
    };
    let mut entries = Vec::with_capacity(rows.len());
    for r in rows {
        if (r.ring, &r.p, r.q, r.index, r.variant) != (first.ring, &first.p, first.q, first.index, first.variant) {
            bail!("rows describe more than one table");
        }
        let agreeing = r
            .agreeing
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| match s {
                "cosets" => Ok(RankVariant::Cosets),
                "orbits" => Ok(RankVariant::Orbits),
                other => bail!("unknown variant `{other}`"),
            })
            .collect::<Result<Vec<_>>>()?;
        entries.push(RankEntry {
            n: r.n,
            value: r.value.clone(),
            cosets: r.cosets.clone(),
            orbits: r.orbits.clone(),
            oracle: r.oracle.clone(),
            lower_bound: r.lower_bound.clone(),
            provenance: r.provenance,
            agreeing,
        });
    }
    Ok(RankTable {
        ring: first.ring,
        p: first.p.clone(),
        q: first.q,
        cosets: first.index,
        variant: first.variant,
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub ring: RingId,
    pub p: String,
    pub q: usize,
    pub units: usize,
    pub index: usize,
    pub condition_1: Verdict,
    pub condition_2: Verdict,
    pub condition_3: Verdict,
    pub condition_4: Verdict,
    pub condition_5: Verdict,
    pub sum_of_two_units: Verdict,
    pub classification: String,
}

impl From<&ConditionReport> for ConditionRow {
    fn from(r: &ConditionReport) -> Self {
        ConditionRow {
            ring: r.ring,
            p: r.p.clone(),
            q: r.q,
            units: r.units,
            index: r.index,
            condition_1: r.condition_1.verdict,
            condition_2: r.condition_2.verdict,
            condition_3: r.condition_3.verdict,
            condition_4: r.condition_4.verdict,
            condition_5: r.condition_5.verdict,
            sum_of_two_units: r.sum_of_two_units.verdict,
            classification: r.classification.to_string(),
        }
    }
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner().context("flushing CSV")?)?)
}

pub fn from_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.context("parsing CSV row")).collect()
}
