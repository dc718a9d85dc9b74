# backend package

