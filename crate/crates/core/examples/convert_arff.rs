//! Parse an ARFF document with labels at the end and write the CSV interchange form.

use mlagg::dataio::{parse_arff, read_csv, write_csv, LabelSpec};

const ARFF: &str = "\
@relation weather
@attribute outlook {sunny,overcast,rainy}
@attribute temperature numeric
@attribute humidity numeric
@attribute play {0,1}
@attribute picnic {0,1}
@data
sunny,85,85,0,1
overcast,83,?,1,1
rainy,70,96,1,0
{1 64, 2 65}
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = parse_arff(ARFF, "weather.arff", &LabelSpec::Last(2))?;
    println!("{} instances, features {:?}, labels {:?}", data.num_instances(), data.feature_names(), data.label_names());

    let path = std::env::temp_dir().join("weather.csv");
    write_csv(&data, &path)?;
    print!("{}", std::fs::read_to_string(&path)?);
    let back = read_csv(&path)?;
    assert_eq!(back.labels(), data.labels());
    Ok(())
}
