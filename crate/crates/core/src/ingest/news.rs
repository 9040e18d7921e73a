//! Tab-delimited news-record parsers: knowledge-graph rows (themes, locations,
//! tone) and event rows (CAMEO base code, action location, average tone).

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::states;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewsRecord {
    pub publish_date: NaiveDate,
    pub state: String,
    pub themes: Vec<String>,
    pub cameo_base_code: Option<String>,
    pub tone: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewsFormat {
    Gkg,
    Events,
}

/// Row-level accounting for a parse. Bad rows are counted, never fatal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseStats {
    pub rows: usize,
    pub records: usize,
    pub malformed: usize,
    pub no_state: usize,
}

impl ParseStats {
    pub fn merge(&mut self, other: ParseStats) {
        self.rows += other.rows;
        self.records += other.records;
        self.malformed += other.malformed;
        self.no_state += other.no_state;
    }
}

// Knowledge-graph 2.1 column positions.
const GKG_DATE: usize = 1;
const GKG_V1_THEMES: usize = 7;
const GKG_V2_THEMES: usize = 8;
const GKG_V1_LOCATIONS: usize = 9;
const GKG_V2_LOCATIONS: usize = 10;
const GKG_TONE: usize = 15;

// Event 2.0 column positions.
const EV_SQLDATE: usize = 1;
const EV_BASE_CODE: usize = 27;
const EV_AVG_TONE: usize = 34;
const EV_ACTION_FULLNAME: usize = 52;
const EV_ACTION_COUNTRY: usize = 53;
const EV_ACTION_ADM1: usize = 54;

pub fn parse_news_file(path: impl AsRef<Path>, format: NewsFormat) -> Result<(Vec<NewsRecord>, ParseStats)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_news(file, format).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn parse_news<R: Read>(reader: R, format: NewsFormat) -> Result<(Vec<NewsRecord>, ParseStats)> {
    let mut stats = ParseStats::default();
    let mut out = Vec::new();
    for line in BufReader::new(reader).lines() {
        let line = line.map_err(|e| Error::io("<reader>", e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        stats.rows += 1;
        let cols: Vec<&str> = line.split('\t').collect();
        let parsed = match format {
            NewsFormat::Gkg => parse_gkg_row(&cols),
            NewsFormat::Events => parse_event_row(&cols),
        };
        match parsed {
            Row::Malformed => stats.malformed += 1,
            Row::NoState => stats.no_state += 1,
            Row::Records(recs) => {
                stats.records += recs.len();
                out.extend(recs);
            }
        }
    }
    Ok((out, stats))
}

enum Row {
    Malformed,
    NoState,
    Records(Vec<NewsRecord>),
}

fn parse_compact_date(text: &str) -> Option<NaiveDate> {
    let t = text.trim();
    if t.len() < 8 || !t.as_bytes()[..8].iter().all(u8::is_ascii_digit) {
        return None;
    }
    NaiveDate::parse_from_str(&t[..8], "%Y%m%d").ok()
}

fn parse_tone(text: &str) -> Option<f64> {
    let first = text.split(',').next()?.trim();
    first.parse::<f64>().ok().filter(|t| t.is_finite())
}

fn parse_gkg_row(cols: &[&str]) -> Row {
    if cols.len() <= GKG_TONE {
        return Row::Malformed;
    }
    let (Some(date), Some(tone)) = (parse_compact_date(cols[GKG_DATE]), parse_tone(cols[GKG_TONE])) else {
        return Row::Malformed;
    };
    let themes = gkg_themes(cols[GKG_V2_THEMES], cols[GKG_V1_THEMES]);
    let locations =
        if cols[GKG_V2_LOCATIONS].trim().is_empty() { cols[GKG_V1_LOCATIONS] } else { cols[GKG_V2_LOCATIONS] };
    let mut mentioned: Vec<&'static str> = Vec::new();
    for entry in locations.split([';', '|']).filter(|e| !e.trim().is_empty()) {
        let fields: Vec<&str> = entry.split('#').collect();
        // a bare entry without `#` separators is just a place name
        let name = if fields.len() == 1 { fields[0] } else { fields.get(1).copied().unwrap_or("") };
        let country = fields.get(2).copied().unwrap_or("");
        let adm1 = fields.get(3).copied().unwrap_or("");
        if let Some(code) = location_state(name, country, adm1) {
            if !mentioned.contains(&code) {
                mentioned.push(code);
            }
        }
    }
    if mentioned.is_empty() {
        return Row::NoState;
    }
    Row::Records(
        mentioned
            .into_iter()
            .map(|state| NewsRecord {
                publish_date: date,
                state: state.to_owned(),
                themes: themes.clone(),
                cameo_base_code: None,
                tone,
            })
            .collect(),
    )
}

/// Themes of a record, deduplicated in first-mention order. The enhanced list
/// carries `THEME,offset` pairs with one entry per mention.
fn gkg_themes(enhanced: &str, plain: &str) -> Vec<String> {
    let source = if enhanced.trim().is_empty() { plain } else { enhanced };
    let mut themes: Vec<String> = Vec::new();
    for item in source.split(';') {
        let theme = item.split(',').next().unwrap_or("").trim();
        if !theme.is_empty() && !themes.iter().any(|t| t == theme) {
            themes.push(theme.to_owned());
        }
    }
    themes
}

/// State component of one location: the ADM1 code when it is a US code,
/// otherwise the state part of a "City, State, United States" style name.
fn location_state(full_name: &str, country: &str, adm1: &str) -> Option<&'static str> {
    let adm1 = adm1.trim();
    if adm1.len() == 4 && adm1.starts_with("US") {
        if let Some(code) = states::resolve(&adm1[2..]) {
            return Some(code);
        }
    }
    let parts: Vec<&str> = full_name.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    match parts.as_slice() {
        [] => None,
        [.., state, "United States"] => states::resolve(state),
        [single] if country.trim().is_empty() || country.trim() == "US" => {
            // a bare name is accepted only when it is a full state name
            states::STATES.iter().find(|(_, name)| name.eq_ignore_ascii_case(single)).map(|(code, _)| *code)
        }
        _ => None,
    }
}

fn parse_event_row(cols: &[&str]) -> Row {
    if cols.len() <= EV_ACTION_ADM1 {
        return Row::Malformed;
    }
    let Some(date) = parse_compact_date(cols[EV_SQLDATE]) else {
        return Row::Malformed;
    };
    let Some(tone) = parse_tone(cols[EV_AVG_TONE]) else {
        return Row::Malformed;
    };
    let code = cols[EV_BASE_CODE].trim();
    if code.len() != 3 || !code.bytes().all(|b| b.is_ascii_digit()) {
        return Row::Malformed;
    }
    let Some(state) = location_state(cols[EV_ACTION_FULLNAME], cols[EV_ACTION_COUNTRY], cols[EV_ACTION_ADM1]) else {
        return Row::NoState;
    };
    Row::Records(vec![NewsRecord {
        publish_date: date,
        state: state.to_owned(),
        themes: Vec::new(),
        cameo_base_code: Some(code.to_owned()),
        tone,
    }])
}

#[cfg(test)]
mod fixtures {
    /// A knowledge-graph row with the given date, themes field, locations
    /// field and tone field; other columns are filler.
    pub fn gkg_row(date: &str, themes: &str, locations: &str, tone: &str) -> String {
        let mut cols = vec![String::new(); 27];
        cols[0] = "20160809000000-1".into();
        cols[1] = date.into();
        cols[2] = "1".into();
        cols[3] = "example.com".into();
        cols[4] = "https://example.com/a".into();
        cols[8] = themes.into();
        cols[10] = locations.into();
        cols[15] = tone.into();
        cols.join("\t")
    }

    pub fn event_row(sqldate: &str, base_code: &str, adm1: &str, tone: &str) -> String {
        let mut cols = vec![String::new(); 61];
        cols[0] = "410412347".into();
        cols[1] = sqldate.into();
        cols[26] = format!("{base_code}0");
        cols[27] = base_code.into();
        cols[28] = base_code[..2].into();
        cols[34] = tone.into();
        cols[51] = "2".into();
        cols[52] = "State, United States".into();
        cols[53] = "US".into();
        cols[54] = adm1.into();
        cols.join("\t")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn gkg_row_maps_fields() {
        let row = gkg_row(
            "20160809120000",
            "TERROR,10;PROTEST,55;TERROR,90",
            "2#New York, United States#US#USNY##42.1497#-74.9384#NY#15",
            "-3.5,1.2,4.7,5.9,21.3,0,412",
        );
        let (recs, stats) = parse_news(row.as_bytes(), NewsFormat::Gkg).unwrap();
        assert_eq!(stats.records, 1);
        assert_eq!(recs[0].themes, vec!["TERROR", "PROTEST"]);
        assert_eq!(recs[0].tone, -3.5);
        assert_eq!(recs[0].state, "NY");
        assert_eq!(recs[0].publish_date, NaiveDate::from_ymd_opt(2016, 8, 9).unwrap());
        assert_eq!(recs[0].cameo_base_code, None);
    }

    #[test]
    fn gkg_location_name_without_adm1() {
        let row = gkg_row("20160810000000", "TERROR", "3#Endicott, New York, United States#US###", "1.0");
        let (recs, _) = parse_news(row.as_bytes(), NewsFormat::Gkg).unwrap();
        assert_eq!(recs[0].state, "NY");
        let row = gkg_row("20160810000000", "TERROR", "New York", "1.0");
        let (recs, _) = parse_news(row.as_bytes(), NewsFormat::Gkg).unwrap();
        assert_eq!(recs[0].state, "NY");
    }

    #[test]
    fn multi_state_record_counts_once_per_state() {
        let row = gkg_row(
            "20160810000000",
            "TERROR",
            "2#Texas, United States#US#USTX;3#Austin, Texas, United States#US#USTX;2#Ohio, United States#US#USOH",
            "0.5",
        );
        let (recs, _) = parse_news(row.as_bytes(), NewsFormat::Gkg).unwrap();
        let states: Vec<_> = recs.iter().map(|r| r.state.as_str()).collect();
        assert_eq!(states, ["TX", "OH"]);
    }

    #[test]
    fn event_row_maps_base_code() {
        let row = event_row("20160809", "015", "USNY", "-2.25");
        let (recs, stats) = parse_news(row.as_bytes(), NewsFormat::Events).unwrap();
        assert_eq!(stats, ParseStats { rows: 1, records: 1, malformed: 0, no_state: 0 });
        assert_eq!(recs[0].cameo_base_code.as_deref(), Some("015"));
        assert_eq!(recs[0].tone, -2.25);
        assert!(recs[0].themes.is_empty());
    }

    #[test]
    fn empty_input_is_empty() {
        let (recs, stats) = parse_news("".as_bytes(), NewsFormat::Gkg).unwrap();
        assert!(recs.is_empty());
        assert_eq!(stats, ParseStats::default());
    }

    #[test]
    fn bad_rows_are_counted_not_fatal() {
        let good = gkg_row("20160809000000", "TERROR", "2#Ohio, United States#US#USOH", "1");
        let foreign = gkg_row("20160809000000", "TERROR", "1#France#FR#FR", "1");
        let bad_date = gkg_row("2016AB09000000", "TERROR", "2#Ohio, United States#US#USOH", "1");
        let bad_tone = gkg_row("20160809000000", "TERROR", "2#Ohio, United States#US#USOH", "NaN");
        let text = [good.as_str(), "short\trow", &foreign, &bad_date, &bad_tone].join("\n");
        let (recs, stats) = parse_news(text.as_bytes(), NewsFormat::Gkg).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(stats, ParseStats { rows: 5, records: 1, malformed: 3, no_state: 1 });
    }

    #[test]
    fn missing_file_is_fatal() {
        assert!(matches!(parse_news_file("/nonexistent/gkg.csv", NewsFormat::Gkg), Err(Error::Io { .. })));
    }
}
