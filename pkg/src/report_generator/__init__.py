"""HTML reports for simulated scans."""
