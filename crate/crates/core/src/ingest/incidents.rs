use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::states;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidentRecord {
    pub event_id: String,
    pub state: String,
    pub date: NaiveDate,
    pub attack_type: String,
    pub weapon_type: String,
    pub target_type: String,
    pub group_name: String,
    pub success: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidentStats {
    pub rows: usize,
    pub records: usize,
    pub bad_date: usize,
    pub bad_state: usize,
}

const COLUMNS: [&str; 10] = [
    "eventid",
    "iyear",
    "imonth",
    "iday",
    "provstate",
    "attacktype1_txt",
    "weaptype1_txt",
    "targtype1_txt",
    "gname",
    "success",
];

pub fn parse_incidents(path: impl AsRef<Path>) -> Result<(Vec<IncidentRecord>, IncidentStats)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_incidents_from(file)
}

/// Comma-separated incident rows with a header. Rows with an unknown day of
/// month (`iday = 0`), an invalid date, or a location outside the 51 states
/// are skipped and counted.
pub fn parse_incidents_from<R: Read>(reader: R) -> Result<(Vec<IncidentRecord>, IncidentStats)> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let mut idx = [0usize; 10];
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        *slot = col(name).ok_or_else(|| Error::invalid(format!("incident file lacks column `{name}`")))?;
    }
    let country = col("country_txt");
    let mut stats = IncidentStats::default();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        stats.rows += 1;
        let field = |i: usize| rec.get(i).unwrap_or("").trim();
        if let Some(c) = country {
            if !field(c).is_empty() && field(c) != "United States" {
                stats.bad_state += 1;
                continue;
            }
        }
        let ymd = (field(idx[1]).parse::<i32>(), field(idx[2]).parse::<u32>(), field(idx[3]).parse::<u32>());
        let date = match ymd {
            (Ok(y), Ok(m), Ok(d)) if d > 0 && m > 0 => NaiveDate::from_ymd_opt(y, m, d),
            _ => None,
        };
        let Some(date) = date else {
            stats.bad_date += 1;
            continue;
        };
        let Some(state) = states::resolve(field(idx[4])) else {
            stats.bad_state += 1;
            continue;
        };
        let category = |i: usize| {
            let v = field(i);
            if v.is_empty() {
                "Unknown".to_owned()
            } else {
                v.to_owned()
            }
        };
        out.push(IncidentRecord {
            event_id: field(idx[0]).to_owned(),
            state: state.to_owned(),
            date,
            attack_type: category(idx[5]),
            weapon_type: category(idx[6]),
            target_type: category(idx[7]),
            group_name: category(idx[8]),
            success: field(idx[9]) == "1",
        });
        stats.records += 1;
    }
    Ok((out, stats))
}

/// Writes incidents in the same comma-separated layout the parser reads.
pub fn write_incidents<W: Write>(writer: W, incidents: &[IncidentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS.iter().chain(["country_txt"].iter()))?;
    for inc in incidents {
        let name = states::STATES.iter().find(|(c, _)| *c == inc.state).map(|(_, n)| *n).unwrap_or(inc.state.as_str());
        w.write_record([
            inc.event_id.as_str(),
            &inc.date.format("%Y").to_string(),
            &inc.date.format("%-m").to_string(),
            &inc.date.format("%-d").to_string(),
            name,
            &inc.attack_type,
            &inc.weapon_type,
            &inc.target_type,
            &inc.group_name,
            if inc.success { "1" } else { "0" },
            "United States",
        ])?;
    }
    w.flush().map_err(|e| Error::io("<incidents>", e))
}

/// `y_i = 1` iff at least one incident happened in `state` on `dates[i]`.
pub fn label_vector(incidents: &[IncidentRecord], state: &str, dates: &[NaiveDate]) -> Vec<u8> {
    let hits: HashSet<NaiveDate> = incidents.iter().filter(|i| i.state == state).map(|i| i.date).collect();
    dates.iter().map(|d| hits.contains(d) as u8).collect()
}

/// Number of distinct (state, date) pairs among incidents within `start..=end`.
pub fn unique_location_days(incidents: &[IncidentRecord], start: NaiveDate, end: NaiveDate) -> usize {
    incidents
        .iter()
        .filter(|i| i.date >= start && i.date <= end)
        .map(|i| (i.state.as_str(), i.date))
        .collect::<HashSet<_>>()
        .len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::dataset::date_range;

    const HEADER: &str =
        "eventid,iyear,imonth,iday,country_txt,provstate,attacktype1_txt,weaptype1_txt,targtype1_txt,gname,success\n";

    #[test]
    fn parses_rows_and_skips_unknown_day() {
        let text = format!(
            "{HEADER}201608090001,2016,8,9,United States,New York,Bombing/Explosion,Explosives,Religious Figures/Institutions,Anti-Semitic extremists,1\n\
             201608100001,2016,8,0,United States,New York,Facility/Infrastructure Attack,Incendiary,Private Citizens & Property,Unknown,1\n\
             201608130001,2016,8,13,Canada,Ontario,Armed Assault,Firearms,Private Citizens & Property,Unknown,0\n\
             201608130002,2016,8,13,United States,Atlantis,Armed Assault,Firearms,,Unknown,0\n"
        );
        let (recs, stats) = parse_incidents_from(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].state, "NY");
        assert_eq!(recs[0].date, NaiveDate::from_ymd_opt(2016, 8, 9).unwrap());
        assert_eq!(recs[0].attack_type, "Bombing/Explosion");
        assert!(recs[0].success);
        assert_eq!(stats, IncidentStats { rows: 4, records: 1, bad_date: 1, bad_state: 2 });
    }

    #[test]
    fn duplicates_survive_parsing_and_collapse_in_labels() {
        let row = "1,2016,8,9,United States,New York,Armed Assault,Firearms,Police,Unknown,1\n";
        let text = format!("{HEADER}{row}{row}");
        let (recs, _) = parse_incidents_from(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        let dates =
            date_range(NaiveDate::from_ymd_opt(2016, 8, 8).unwrap(), NaiveDate::from_ymd_opt(2016, 8, 10).unwrap());
        assert_eq!(label_vector(&recs, "NY", &dates), vec![0, 1, 0]);
        assert_eq!(label_vector(&recs, "CA", &dates), vec![0, 0, 0]);
        assert_eq!(label_vector(&[], "NY", &dates), vec![0, 0, 0]);
    }

    #[test]
    fn writer_roundtrips() {
        let inc = IncidentRecord {
            event_id: "7".into(),
            state: "DC".into(),
            date: NaiveDate::from_ymd_opt(2017, 1, 2).unwrap(),
            attack_type: "Armed Assault".into(),
            weapon_type: "Firearms".into(),
            target_type: "Police".into(),
            group_name: "Unknown".into(),
            success: false,
        };
        let mut buf = Vec::new();
        write_incidents(&mut buf, std::slice::from_ref(&inc)).unwrap();
        let (back, _) = parse_incidents_from(buf.as_slice()).unwrap();
        assert_eq!(back, vec![inc]);
    }

    #[test]
    fn missing_column_is_an_error() {
        assert!(parse_incidents_from("eventid,iyear\n1,2016\n".as_bytes()).is_err());
    }
}
