# backend.services package

