from .validator import check_coherence, check_redundancy, compile_report, count_skips, curate, review_sample

__all__ = ["check_coherence", "check_redundancy", "compile_report", "count_skips", "curate", "review_sample"]
