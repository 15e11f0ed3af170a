#!/usr/bin/env python3
"""One-page PDF used as a report document in package fixtures."""
import sys

from reportlab.pdfgen import canvas

c = canvas.Canvas(sys.argv[1], invariant=1)
c.drawString(72, 720, "Les thermes de Chassenon - rapport de restitution")
c.showPage()
c.save()
