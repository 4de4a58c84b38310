//! Parses a Hub-layout submission and truth file from memory and applies
//! the inclusion criteria.
//!
//! Run with `cargo run --example ingest_hub_csv`.

use crowdcast::grid::LEVELS;
use crowdcast::ingest::{
    apply_inclusion_criteria, hub_locations, parse_submissions, EligibilityList, InclusionCriteria,
    ParseOptions,
};
use crowdcast::model::{week_end, week_of};
use crowdcast::Category;

fn submission_csv(forecast_date: &str, horizons: &[u8]) -> String {
    let date = chrono::NaiveDate::parse_from_str(forecast_date, "%Y-%m-%d").unwrap();
    let origin = week_of(date) - 1;
    let mut s = String::from("forecast_date,target,target_end_date,location,type,quantile,value\n");
    for &h in horizons {
        let end = week_end(origin + h as i64);
        s += &format!("{forecast_date},{h} wk ahead cum death,{end},06,point,NA,{}\n", 5_000 + 100 * h as u32);
        for (i, theta) in LEVELS.iter().enumerate() {
            let value = 4_600 + 100 * h as usize + 35 * i;
            s += &format!("{forecast_date},{h} wk ahead cum death,{end},06,quantile,{theta},{value}\n");
        }
    }
    s
}

fn main() -> crowdcast::Result<()> {
    let criteria = InclusionCriteria {
        first_origin_week: 18,
        last_origin_week: None,
        locations: hub_locations(),
    };
    let complete = submission_csv("2020-06-22", &[1, 2, 3, 4]);
    let partial = submission_csv("2020-06-22", &[1, 2]);

    for (team, text) in [("complete", complete), ("partial", partial)] {
        let parsed = parse_submissions(text.as_bytes(), team, team, Category::Other, ParseOptions::default())?;
        let inc = apply_inclusion_criteria(parsed.submissions, &EligibilityList::new(), &criteria);
        println!("{team}: {} retained, {} dropped", inc.retained.len(), inc.dropped.len());
        for s in &inc.retained {
            println!(
                "  origin week {} horizon {} median {}",
                s.origin_week,
                s.horizon,
                s.curve.median()
            );
        }
        for d in inc.diagnostics.iter() {
            println!("  {d}");
        }
    }
    Ok(())
}
