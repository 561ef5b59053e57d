#!/usr/bin/env python
from pramsey.ctl import ctl

if __name__ == '__main__':
    ctl(None)
