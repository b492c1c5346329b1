import os

import pandas as pd
import streamlit as st
from dotenv import load_dotenv

load_dotenv()

LOG_FILE = os.getenv("POSET_QUEUES_VERIFY_LOG", "verify_log.csv")


def load_verification_log(path: str = LOG_FILE) -> pd.DataFrame:
    """Read the verifier CSV; ``passed`` becomes pass / fail / budget."""
    df = pd.read_csv(path, dtype={"passed": "string", "proven": "string"})
    df["timestamp"] = pd.to_datetime(df["timestamp"])
    df["status"] = df["passed"].map({"True": "pass", "False": "fail"}).fillna("budget")
    df["proven"] = df["proven"] == "True"
    return df


def summarize_checks(df: pd.DataFrame) -> pd.DataFrame:
    """One row per check: run count, pass rate, failures, mean and max runtime."""
    summary = df.groupby("check").agg(
        runs=("status", "size"),
        pass_rate=("status", lambda s: (s == "pass").mean()),
        failures=("status", lambda s: int((s == "fail").sum())),
        mean_elapsed=("elapsed", "mean"),
        max_elapsed=("elapsed", "max"),
        last_run=("timestamp", "max"),
    )
    return summary.sort_values(["failures", "pass_rate"], ascending=[False, True]).reset_index()


def render():
    st.set_page_config(layout="wide")
    st.title("Queue Layout Verification Dashboard")

    try:
        df = load_verification_log(LOG_FILE)
    except FileNotFoundError:
        st.warning("No verification log found yet. Run `python cli_io.py verify-paper` first.")
        st.stop()

    check_filter = st.text_input("Filter by check (optional):")
    if check_filter:
        df = df[df["check"].str.contains(check_filter, case=False, na=False)]
    levels = st.multiselect("Levels:", sorted(df["level"].unique()), default=sorted(df["level"].unique()))
    df = df[df["level"].isin(levels)]

    st.header("Pass Rate per Check")
    summary = summarize_checks(df)
    st.dataframe(summary, use_container_width=True)
    st.bar_chart(summary.set_index("check")["pass_rate"])

    st.header("All Runs")
    st.dataframe(
        df[["timestamp", "level", "check", "claim", "observed", "status", "proven", "elapsed"]]
        .sort_values("timestamp", ascending=False),
        use_container_width=True,
    )

    st.header("Slowest Checks")
    for _, row in df.sort_values("elapsed", ascending=False).head(3).iterrows():
        st.markdown(f"**Check:** {row['check']} ({row['level']})")
        st.markdown(f"**Observed:** {row['observed']}")
        st.markdown(f"- Elapsed: {row['elapsed']:.2f}s")
        st.markdown("---")

    st.header("Failing or Inconclusive Runs")
    bad = df[df["status"] != "pass"]
    if bad.empty:
        st.success("Every recorded run passed.")
    for _, row in bad.sort_values("timestamp", ascending=False).iterrows():
        st.markdown(f"**Check:** {row['check']} ({row['status']})")
        st.markdown(f"**Claim:** {row['claim']}")
        st.markdown(f"**Observed:** {row['observed']}")
        st.markdown("---")


if __name__ == "__main__":
    render()
