#!/usr/bin/env python
# -*- coding: UTF-8 -*-
from wavelab.cli import lab


if __name__ == "__main__":
    lab.main()
