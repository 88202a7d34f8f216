"""
VerifyScripts Package

This package builds verification corpora, runs verify_bijection over them
and writes / replays the resulting reports.
"""
