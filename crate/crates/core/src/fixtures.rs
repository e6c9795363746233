//! Published case-study data, embedded so that examples and tests run
//! without external files.

use crate::error::{Error, Result};
use crate::series::{SeriesKind, TimeSeries};

/// Weekly number of issued loyalty cards, weeks 48/2011 – 48/2013.
const LOYALTY_NLC: [f64; 105] = [
    7236., 11904., 12887., 10665., 5616., 7133., 8428., 7263., 7135., 7038., 6173., 5061., 4237.,
    4953., 5536., 5387., 4868., 4673., 3496., 5474., 5576., 5245., 5196., 5563., 5252., 4616.,
    5690., //
    4307., 5776., 5561., 5521., 5525., 5625., 5393., 5132., 5768., 5826., 4683., 5337., 7216.,
    6396., 5325., 4421., 4111., 4343., 4462., 3780., 4048., 3708., 3474., 4462., 3957., 5405.,
    7913., //
    7741., 8950., 3447., 3510., 6334., 6793., 6846., 5764., 5803., 5121., 4223., 4955., 3939.,
    3566., 7844., 5085., 3158., 3550., 4468., 3498., 3726., 2339., 2628., 2708., 3482., 2142.,
    2710., //
    2077., 1889., 1686., 1651., 1402., 1247., 2026., 1847., 899., 1132., 1920., 1551., 1172., 935.,
    903., 826., 619., 840., 701., 601., 882., 775., 849., 1238.,
];

/// Total issued cards, weeks 05/2012 – 14/2012.
const LOYALTY_TNLC_WINDOW: [f64; 10] = [
    85305., 91478., 96539., 100776., 105729., 111265., 116652., 121520., 126193., 129689.,
];

/// Index of week 05/2012 in [`LOYALTY_NLC`].
const TNLC_WINDOW_START: usize = 9;

const MOBILE_GERMANY: [f64; 18] = [
    0.05, 0.07, 0.1, 0.17, 0.28, 0.58, 0.67, 0.71, 0.77, 0.85, 0.95, 1.02, 1.15, 1.27, 1.26, 1.06,
    1.1, 1.12,
];

const MOBILE_SLOVAKIA: [f64; 18] = [
    0.01, 0.01, 0.04, 0.09, 0.12, 0.23, 0.4, 0.54, 0.68, 0.79, 0.84, 0.91, 1.12, 1.02, 1.01, 1.09,
    1.1, 1.12,
];

/// Monthly medical-device purchases, 06/2009 – 03/2012.
const MEDICAL_QMD: [f64; 34] = [
    3., 12., 8., 17., 22., 30., 15., 11., 4., 23., 8., 20., 11., 10., 15., 10., 17., 16., 15., 4.,
    11., 8., 8., 5., 9., 12., 11., 16., 17., 25., 12., 8., 5., 5.,
];

pub const FIXTURE_NAMES: [&str; 6] = [
    "loyalty-nlc",
    "loyalty-tnlc-window",
    "loyalty-tnlc-fit-window",
    "mobile-germany",
    "mobile-slovakia",
    "medical-qmd",
];

/// A named embedded series.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub series: TimeSeries,
}

impl Fixture {
    pub fn by_name(name: &str) -> Result<Self> {
        let (name, series) = match name {
            "loyalty-nlc" => ("loyalty-nlc", loyalty_nlc()),
            "loyalty-tnlc-window" => ("loyalty-tnlc-window", loyalty_tnlc_window()),
            "loyalty-tnlc-fit-window" => ("loyalty-tnlc-fit-window", loyalty_tnlc_fit_window()),
            "mobile-germany" => ("mobile-germany", mobile_germany()),
            "mobile-slovakia" => ("mobile-slovakia", mobile_slovakia()),
            "medical-qmd" => ("medical-qmd", medical_qmd()),
            other => {
                return Err(Error::Domain(format!(
                    "unknown fixture '{other}' (known: {})",
                    FIXTURE_NAMES.join(", ")
                )))
            }
        };
        Ok(Self { name, series })
    }

    pub fn all() -> Vec<Self> {
        FIXTURE_NAMES
            .iter()
            .map(|n| Self::by_name(n).expect("listed fixtures exist"))
            .collect()
    }
}

/// `week/yy` labels starting at week `week` of 20`year`, 52 weeks per year.
fn week_labels(mut week: u32, mut year: u32, count: usize) -> Vec<String> {
    (0..count)
        .map(|_| {
            let label = format!("{week:02}/{year:02}");
            week += 1;
            if week > 52 {
                week = 1;
                year += 1;
            }
            label
        })
        .collect()
}

fn month_labels(mut month: u32, mut year: u32, count: usize) -> Vec<String> {
    (0..count)
        .map(|_| {
            let label = format!("{month:02}/{year:02}");
            month += 1;
            if month > 12 {
                month = 1;
                year += 1;
            }
            label
        })
        .collect()
}

fn years(first: u32, count: usize) -> Vec<String> {
    (first..).take(count).map(|y| y.to_string()).collect()
}

fn build(labels: Vec<String>, values: &[f64], kind: SeriesKind) -> TimeSeries {
    TimeSeries::new(labels, values.to_vec(), kind).expect("fixture labels match values")
}

pub fn loyalty_nlc() -> TimeSeries {
    build(
        week_labels(48, 11, LOYALTY_NLC.len()),
        &LOYALTY_NLC,
        SeriesKind::Raw,
    )
}

pub fn loyalty_tnlc_window() -> TimeSeries {
    build(
        week_labels(5, 12, LOYALTY_TNLC_WINDOW.len()),
        &LOYALTY_TNLC_WINDOW,
        SeriesKind::Cumulative,
    )
}

/// The ten-week window extended by week 15/2012, the span of the reference
/// quartic trend.
pub fn loyalty_tnlc_fit_window() -> TimeSeries {
    let start = TNLC_WINDOW_START;
    loyalty_nlc()
        .cumulate()
        .expect("raw fixture")
        .window(start, start + LOYALTY_TNLC_WINDOW.len() + 1)
}

pub fn mobile_germany() -> TimeSeries {
    build(
        years(1995, MOBILE_GERMANY.len()),
        &MOBILE_GERMANY,
        SeriesKind::Cumulative,
    )
}

pub fn mobile_slovakia() -> TimeSeries {
    build(
        years(1995, MOBILE_SLOVAKIA.len()),
        &MOBILE_SLOVAKIA,
        SeriesKind::Cumulative,
    )
}

pub fn medical_qmd() -> TimeSeries {
    build(
        month_labels(6, 9, MEDICAL_QMD.len()),
        &MEDICAL_QMD,
        SeriesKind::Raw,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_labels() {
        let nlc = loyalty_nlc();
        assert_eq!(nlc.len(), 105);
        assert_eq!(nlc.label(0), "48/11");
        assert_eq!(nlc.label(5), "01/12");
        assert_eq!(nlc.label(27), "23/12");
        assert_eq!(nlc.label(54), "50/12");
        assert_eq!(nlc.label(104), "48/13");
        assert_eq!(mobile_germany().len(), 18);
        assert_eq!(mobile_slovakia().label(17), "2012");
        let qmd = medical_qmd();
        assert_eq!(qmd.len(), 34);
        assert_eq!(qmd.label(5), "11/09");
        assert_eq!(qmd.label(33), "03/12");
    }

    #[test]
    fn tnlc_window_is_cumulated_nlc() {
        let cum = loyalty_nlc().cumulate().unwrap();
        let window = loyalty_tnlc_window();
        let slice = cum.window(TNLC_WINDOW_START, TNLC_WINDOW_START + 10);
        assert_eq!(slice.values(), window.values());
        assert_eq!(slice.labels(), window.labels());
        let fit = loyalty_tnlc_fit_window();
        assert_eq!(fit.len(), 11);
        assert_eq!(&fit.values()[..10], window.values());
        assert_eq!(fit.label(10), "15/12");
        assert_eq!(fit.values()[10], 135163.0);
    }

    #[test]
    fn lookup() {
        assert_eq!(Fixture::all().len(), FIXTURE_NAMES.len());
        assert!(Fixture::by_name("nope").is_err());
    }
}
