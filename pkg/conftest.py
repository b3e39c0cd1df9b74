import sys
import os

# Add the project root to sys.path for import resolution
sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))
