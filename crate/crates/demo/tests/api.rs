use attnstab_core::fixtures::PIEZO_APPENDIX_JSON;
use attnstab_demo::{fixture_text, stability_json, sweep_json, train_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn sweep_puts_2_and_6_closest_to_zero() {
    let v = parse(&sweep_json(PIEZO_APPENDIX_JSON, "appendix", 3.0, 0.5, "column").unwrap());
    assert_eq!(v["deltas"].as_array().unwrap().len(), 7);
    // 2 and 6 are symmetric, so their order is decided by roundoff
    let mut top: Vec<u64> = v["ranking"].as_array().unwrap()[..2].iter().map(|x| x.as_u64().unwrap()).collect();
    top.sort();
    assert_eq!(top, vec![2, 6]);
    let last = v["trajectories"][2]["values"][6].as_f64().unwrap();
    assert!((last + 0.252018912041).abs() < 1e-9);
}

#[test]
fn stability_rows() {
    let v = parse(&stability_json(PIEZO_APPENDIX_JSON, "appendix").unwrap());
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[6]["nstc_rank"], 1);
    assert_eq!(rows[2]["motif_rank"], 1);
    assert!((rows[7]["total_cost"].as_f64().unwrap() - 0.29).abs() < 0.01);
}

#[test]
fn training_converges_and_attends_to_2_and_6() {
    let v = parse(&train_json(PIEZO_APPENDIX_JSON, "appendix", 0, 500, 0.8, 0, 1.0).unwrap());
    assert_eq!(v["loss"].as_array().unwrap().len(), 500);
    assert!(v["final_loss"].as_f64().unwrap() <= 0.005);
    let mut top: Vec<u64> = v["ranking"].as_array().unwrap()[..2].iter().map(|x| x.as_u64().unwrap()).collect();
    top.sort();
    assert_eq!(top, vec![2, 6]);
}

#[test]
fn errors_are_messages() {
    assert!(sweep_json("{", "appendix", 3.0, 0.5, "column").is_err());
    assert!(sweep_json(PIEZO_APPENDIX_JSON, "bogus", 3.0, 0.5, "column").is_err());
    assert!(sweep_json(PIEZO_APPENDIX_JSON, "appendix", 3.0, 0.0, "column").is_err());
    assert!(train_json(PIEZO_APPENDIX_JSON, "appendix", 0, 10, 0.8, 99, 2.0).is_err());
    assert!(fixture_text("printed").unwrap().contains("1.3083"));
}

#[test]
fn edited_model_text_is_analyzed() {
    let mut v = parse(PIEZO_APPENDIX_JSON);
    v["adjacency"][3][1] = Value::from(-1.3083);
    let edited = v.to_string();
    let a = parse(&stability_json(PIEZO_APPENDIX_JSON, "appendix").unwrap());
    let b = parse(&stability_json(&edited, "appendix").unwrap());
    assert_ne!(a[1]["w"], b[1]["w"]);
}
