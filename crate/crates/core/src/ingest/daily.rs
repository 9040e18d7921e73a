use chrono::NaiveDate;
use ndarray::Array2;

use super::news::NewsRecord;
use super::registry::Registry;

/// Daily feature matrix for one state over `start..=end`.
///
/// Counts are the number of records carrying a theme (or base code) that day;
/// sentiments are the mean tone of those records, 0 on days without any.
/// Records outside the range, for other states, or with keys missing from the
/// registry are ignored. Returns the matrix and the number of out-of-range
/// records for `state` that were skipped.
pub fn build_daily_features(
    records: &[NewsRecord],
    state: &str,
    start: NaiveDate,
    end: NaiveDate,
    registry: &Registry,
) -> (Array2<f64>, usize) {
    let n = if end >= start { (end - start).num_days() as usize + 1 } else { 0 };
    let m = registry.feature_count();
    let [tc, ts, cc, cs] = registry.offsets();
    let mut x = Array2::<f64>::zeros((n, m));
    let mut skipped = 0;
    for rec in records.iter().filter(|r| r.state == state) {
        if rec.publish_date < start || rec.publish_date > end {
            skipped += 1;
            continue;
        }
        let day = (rec.publish_date - start).num_days() as usize;
        for theme in &rec.themes {
            if let Some(slot) = registry.theme_slot(theme) {
                x[[day, tc + slot]] += 1.0;
                x[[day, ts + slot]] += rec.tone;
            }
        }
        if let Some(slot) = rec.cameo_base_code.as_deref().and_then(|c| registry.cameo_slot(c)) {
            x[[day, cc + slot]] += 1.0;
            x[[day, cs + slot]] += rec.tone;
        }
    }
    // tone sums -> means
    for (count_off, sent_off, width) in [(tc, ts, registry.themes().len()), (cc, cs, registry.cameo_codes().len())] {
        for mut row in x.rows_mut() {
            for k in 0..width {
                let count = row[count_off + k];
                if count > 0.0 {
                    row[sent_off + k] /= count;
                }
            }
        }
    }
    (x, skipped)
}
